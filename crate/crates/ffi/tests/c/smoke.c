#include <math.h>
#include <stdio.h>
#include "searchload.h"

int main(void) {
    SlProblem *problem = NULL;
    SlResult *result = NULL;
    SlOptimum opt;
    if (sl_problem_from_preset("q2_swerling2", &problem) != SL_STATUS_OK) {
        return 1;
    }
    if (sl_optimize(problem, &result) != SL_STATUS_OK) {
        return 2;
    }
    if (sl_result_optimum(result, &opt) != SL_STATUS_OK) {
        return 3;
    }
    printf("eta=%.6f r_s=%.6f l_s=%.6f\n", opt.eta, opt.r_s, opt.l_s);
    sl_result_free(result);
    sl_problem_free(problem);
    if (sl_problem_from_preset("nope", &problem) != SL_STATUS_CONFIG || sl_last_error_message() == NULL) {
        return 4;
    }
    return fabs(opt.eta - 0.0173) < 5e-4 ? 0 : 5;
}
