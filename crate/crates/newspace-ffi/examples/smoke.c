/* Minimal consumer of the C interface: build a space, read its dimensions,
 * run a theorem check, export an operator. Build (from the repo root):
 *
 *   cargo build -p newspace-ffi --release
 *   cc crates/newspace-ffi/examples/smoke.c \
 *      -Icrates/newspace-ffi/include \
 *      target/release/libnewspace_ffi.a -lpthread -ldl -lm -o smoke
 */
#include "newspace.h"
#include <assert.h>
#include <stdio.h>
#include <string.h>

int main(void) {
    NewspaceSpace *space = NULL;
    assert(newspace_space_new(22, 2, &space) == NEWSPACE_STATUS_OK);

    size_t full = 0, cuspidal = 0, newdim = 0;
    assert(newspace_space_dims(space, &full, &cuspidal, &newdim) == NEWSPACE_STATUS_OK);
    printf("level 22: dim %zu, cuspidal %zu, new %zu\n", full, cuspidal, newdim);
    assert(full == 7 && cuspidal == 4 && newdim == 0);

    char *json = NULL;
    assert(newspace_check(space, "T1", 0, &json) == NEWSPACE_STATUS_OK);
    assert(strstr(json, "T1.newspace-eq") != NULL);
    newspace_string_free(json);

    assert(newspace_emit(space, "Qp", 11, 0, 0, 0, 0, &json) == NEWSPACE_STATUS_OK);
    assert(strstr(json, "\"dim\": 4") != NULL);
    newspace_string_free(json);

    assert(newspace_local_verify(3, 2, &json) == NEWSPACE_STATUS_OK);
    newspace_string_free(json);

    newspace_space_free(space);
    puts("smoke test passed");
    return 0;
}
