/* cc -Icrates/ffi/include crates/ffi/examples/merge.c target/release/libcrossmerge_ffi.a -lpthread -ldl -lm */
#include <stdio.h>
#include "crossmerge.h"

int main(void) {
    int64_t a[] = {0, 0, 1, 1, 1, 2, 2, 2, 4, 5, 5, 5, 5, 5, 6, 6, 7, 7};
    int64_t b[] = {1, 1, 3, 3, 3, 3, 4, 5, 6, 6, 6, 6, 7, 7, 7};
    int64_t out[33];
    uint8_t origin[33];
    CmExecutor *ex = NULL;
    CmStatus st = cm_executor_new(2, 1, &ex);
    if (st != CM_STATUS_OK) {
        fprintf(stderr, "%s\n", cm_status_message(st));
        return 1;
    }
    st = cm_merge_i64(ex, a, 18, b, 15, 5, out, origin, NULL);
    if (st != CM_STATUS_OK) {
        fprintf(stderr, "%s\n", cm_status_message(st));
        return 1;
    }
    for (int i = 0; i < 33; i++) {
        printf("%lld%c%s", (long long)out[i], origin[i] ? 'B' : 'A', i == 32 ? "\n" : " ");
    }

    CmPlan *plan = NULL;
    cm_plan_new_i64(a, 18, b, 15, 5, &plan);
    for (size_t i = 0; i < cm_plan_task_count(plan); i++) {
        CmTask t;
        cm_plan_get_task(plan, i, &t);
        printf("%c\t%c\t%zu\t%zu\t%zu\t%zu\t%zu\n", t.side ? 'B' : 'A', t.case_letter, t.a_start, t.a_end,
               t.b_start, t.b_end, t.out_offset);
    }
    cm_plan_free(plan);
    cm_executor_free(ex);
    return 0;
}
