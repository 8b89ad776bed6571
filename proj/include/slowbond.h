#ifndef SLOWBOND_H
#define SLOWBOND_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes returned by every entry point. On any non-OK status,
 * sb_last_error() holds a human-readable message for the calling thread. */
typedef enum sb_status {
    SB_OK = 0,
    SB_ERR_INVALID_ARGUMENT = 1,
    SB_ERR_DOMAIN = 2,
    SB_ERR_ORDER_UNSUPPORTED = 3,
    SB_ERR_DIVERGENT_SEMINORM = 4,
    SB_ERR_DIVERGENT_NORM = 5,
    SB_ERR_ACCURACY = 6,
    SB_ERR_CONSISTENCY = 7,
    SB_ERR_ORDERING = 8,
    SB_ERR_DATA = 9,
    SB_ERR_PARSE = 10,
    SB_ERR_IO = 11,
    SB_ERR_NULL_POINTER = 12,
    SB_ERR_INTERNAL = 13
} sb_status;

const char* sb_last_error(void);

/* kind: 0 = line (beta < 1), 1 = robin (beta = 1, parameter alpha),
 * 2 = neumann (beta > 1, including +inf). */
typedef struct sb_regime {
    int kind;
    double beta;
    double alpha;
} sb_regime;

/* Opaque test-function handle. Handles are immutable and freed with
 * sb_testfn_free; operators and semigroup images return new handles. */
typedef struct sb_testfn sb_testfn;

/* Build a function from its family descriptor, e.g.
 * "hermite_gauss:g=1;c=1,0,-0.5" or "zero". */
sb_status sb_testfn_parse(const char* descriptor, sb_testfn** out);
void sb_testfn_free(sb_testfn* fn);

/* Serialized descriptor of fn; fails with SB_ERR_INVALID_ARGUMENT when the
 * buffer is too small. */
sb_status sb_testfn_describe(const sb_testfn* fn, char* buf, size_t cap);

/* k-th one-sided derivative at x; right_side selects the 0+ branch at the
 * origin (nonzero) or the 0- branch (zero). */
sb_status sb_testfn_eval(const sb_testfn* fn, double x, int k, int right_side, double* out);

sb_status sb_testfn_seminorm(const sb_testfn* fn, int k, int l, double* out);

/* Truncated Frechet metric between two functions. */
sb_status sb_testfn_metric(const sb_testfn* a, const sb_testfn* b, int trunc, double* out);

sb_status sb_testfn_l2norm(const sb_testfn* fn, const sb_regime* regime, double* out);

sb_status sb_testfn_grad(const sb_testfn* fn, sb_testfn** out);
sb_status sb_testfn_laplace(const sb_testfn* fn, sb_testfn** out);

/* Boundary-condition check at the origin for the regime's function class.
 * pass gets 0/1; max_residual the worst relative residual seen. */
sb_status sb_testfn_check_membership(const sb_testfn* fn, const sb_regime* regime, int max_k,
                                     double tol, int* pass, double* max_residual);

/* Heat kernel derivative d^n/dx^n phi_t(x). */
sb_status sb_heat_kernel(double t, double x, int n, double* out);

/* k-th derivative of the regime semigroup image T_t H at x. */
sb_status sb_semigroup_eval(const sb_regime* regime, double t, const sb_testfn* fn, double x,
                            int k, int right_side, double* out);

/* T_t H as a new handle (composes in time with later applications). */
sb_status sb_semigroup_image(const sb_regime* regime, double t, const sb_testfn* fn,
                             sb_testfn** out);

/* Stationary OU covariance target chi(rho) <T_t H, G>. */
sb_status sb_ou_covariance(const sb_regime* regime, double rho, const sb_testfn* h,
                           const sb_testfn* g, double t, double* out);

/* Run a campaign command ("validate", "evolve", "simulate", "compare",
 * "report") against a config file. seed, regime, beta and alpha may be NULL
 * (no override); regime names the function class ("line", "robin",
 * "neumann"). exit_code receives the process-style result: 0 ok, 1 suite
 * failure. Config and usage problems surface as a non-OK status instead. */
sb_status sb_campaign_run(const char* command, const char* config_path, const char* out_dir,
                          const uint64_t* seed, int workers, const char* regime,
                          const double* beta, const double* alpha, int* exit_code);

#ifdef __cplusplus
}
#endif

#endif /* SLOWBOND_H */
