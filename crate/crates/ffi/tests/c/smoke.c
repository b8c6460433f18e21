#include <stdio.h>

#include "writeright.h"

int main(void) {
    WrCorrector *corrector = NULL;
    if (wr_corrector_new(NULL, NULL, &corrector) != WR_STATUS_OK) {
        return 1;
    }
    char *out = NULL;
    if (wr_corrector_correct(corrector, "I gess almost people cannot speaking English.", &out) != WR_STATUS_OK) {
        return 2;
    }
    printf("%s\n", out);
    wr_string_free(out);
    wr_corrector_free(corrector);

    int64_t gold[] = {0, 1};
    int64_t pred[] = {1, 0};
    double kappa = 0.0;
    if (wr_qwk(gold, pred, 2, 0, 1, &kappa) != WR_STATUS_OK) {
        return 3;
    }
    printf("%.4f\n", kappa);

    WrTreeMetrics metrics;
    if (wr_tree_metrics("(S (NP (DT the) (NN cat)) (VP (VBD sat)))", &metrics) != WR_STATUS_OK) {
        return 4;
    }
    printf("%zu %.2f %.2f %.2f\n", metrics.leaves, metrics.yngve_mean, metrics.yngve_max, metrics.frazier_mean);
    if (wr_tree_metrics("(S (NP", &metrics) != WR_STATUS_PARSE_ERROR) {
        return 5;
    }
    printf("%s\n", wr_last_error());
    return 0;
}
