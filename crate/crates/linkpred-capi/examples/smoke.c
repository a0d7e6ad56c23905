/* Minimal C consumer: generate a synthetic dataset, score it with the
 * EWMA predictor, fuse with current friendships and evaluate.
 *
 * Build (from the workspace root, after `cargo build -p linkpred-capi`):
 *   cc crates/linkpred-capi/examples/smoke.c \
 *      -Icrates/linkpred-capi/include \
 *      target/debug/liblinkpred_capi.a -lpthread -ldl -lm -o smoke
 */
#include <stdio.h>
#include <linkpred.h>

int main(void) {
    LpDataset *ds = NULL;
    LpStatus st = lp_dataset_synthetic(60, 5, 60, 0.2, 0.01, 0.3, 7, &ds);
    if (st != LP_OK) {
        fprintf(stderr, "synthetic failed: %s\n", lp_last_error());
        return 1;
    }
    printf("dataset: %u nodes, %u snapshots (linkpred %s)\n",
           lp_dataset_node_count(ds), lp_dataset_snapshot_count(ds), lp_version());

    LpPredictorParams params = lp_default_params();
    LpScores *scores = NULL;
    if (lp_predict(ds, "ewma", 2, &params, &scores) != LP_OK) {
        fprintf(stderr, "predict failed: %s\n", lp_last_error());
        return 1;
    }

    LpScores *fused = NULL;
    if (lp_fuse_current(scores, ds, 2, 0.1, &fused) != LP_OK) {
        fprintf(stderr, "fuse failed: %s\n", lp_last_error());
        return 1;
    }

    LpEvalReport report;
    if (lp_evaluate(fused, ds, 2, &report) != LP_OK) {
        fprintf(stderr, "evaluate failed: %s\n", lp_last_error());
        return 1;
    }
    printf("prauc_new=%.4f auc_prev=%.4f gmauc=%.4f (new %llu+, prev %llu+)\n",
           report.prauc_new, report.auc_prev, report.gmauc,
           (unsigned long long)report.p_new, (unsigned long long)report.p_prev);

    lp_scores_free(fused);
    lp_scores_free(scores);
    lp_dataset_free(ds);
    return 0;
}
