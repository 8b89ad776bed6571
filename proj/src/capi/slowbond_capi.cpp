#include "slowbond.h"

#include <cstring>
#include <string>

#include "core/campaign.hpp"
#include "core/semigroups.hpp"
#include "core/stats.hpp"

namespace {

thread_local std::string g_last_error;

sb_status status_from(const sb::Error& e) {
    g_last_error = e.what();
    switch (e.code()) {
        case sb::ErrorCode::InvalidArgument: return SB_ERR_INVALID_ARGUMENT;
        case sb::ErrorCode::DomainError: return SB_ERR_DOMAIN;
        case sb::ErrorCode::OrderUnsupported: return SB_ERR_ORDER_UNSUPPORTED;
        case sb::ErrorCode::DivergentSeminorm: return SB_ERR_DIVERGENT_SEMINORM;
        case sb::ErrorCode::DivergentNorm: return SB_ERR_DIVERGENT_NORM;
        case sb::ErrorCode::AccuracyNotReached: return SB_ERR_ACCURACY;
        case sb::ErrorCode::ConsistencyError: return SB_ERR_CONSISTENCY;
        case sb::ErrorCode::OrderingError: return SB_ERR_ORDERING;
        case sb::ErrorCode::DataError: return SB_ERR_DATA;
        case sb::ErrorCode::ParseError: return SB_ERR_PARSE;
        case sb::ErrorCode::IoError: return SB_ERR_IO;
    }
    return SB_ERR_INTERNAL;
}

template <typename F>
sb_status guarded(F&& body) {
    try {
        body();
        return SB_OK;
    } catch (const sb::Error& e) {
        return status_from(e);
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return SB_ERR_INTERNAL;
    }
}

sb_status require(bool ok, const char* message) {
    if (ok) return SB_OK;
    g_last_error = message;
    return SB_ERR_NULL_POINTER;
}

sb::Regime to_regime(const sb_regime& r) {
    switch (r.kind) {
        case 0: return sb::Regime::line(r.beta);
        case 1: return sb::Regime::robin(r.alpha);
        case 2: return sb::Regime::neumann(r.beta);
        default:
            throw sb::Error(sb::ErrorCode::InvalidArgument, "sb_regime.kind must be 0, 1 or 2");
    }
}

sb::Side side_of(int right_side) { return right_side ? sb::Side::Right : sb::Side::Left; }

}  // namespace

struct sb_testfn {
    sb::TestFunctionPtr fn;
};

extern "C" {

const char* sb_last_error(void) { return g_last_error.c_str(); }

sb_status sb_testfn_parse(const char* descriptor, sb_testfn** out) {
    if (sb_status s = require(descriptor && out, "sb_testfn_parse: null argument")) return s;
    return guarded([&] { *out = new sb_testfn{sb::parse_family_descriptor(descriptor)}; });
}

void sb_testfn_free(sb_testfn* fn) { delete fn; }

sb_status sb_testfn_describe(const sb_testfn* fn, char* buf, size_t cap) {
    if (sb_status s = require(fn && buf, "sb_testfn_describe: null argument")) return s;
    return guarded([&] {
        const std::string& tag = fn->fn->family_tag();
        if (tag.size() + 1 > cap)
            throw sb::Error(sb::ErrorCode::InvalidArgument, "sb_testfn_describe: buffer too small");
        std::memcpy(buf, tag.c_str(), tag.size() + 1);
    });
}

sb_status sb_testfn_eval(const sb_testfn* fn, double x, int k, int right_side, double* out) {
    if (sb_status s = require(fn && out, "sb_testfn_eval: null argument")) return s;
    return guarded([&] { *out = fn->fn->eval(x, k, side_of(right_side)); });
}

sb_status sb_testfn_seminorm(const sb_testfn* fn, int k, int l, double* out) {
    if (sb_status s = require(fn && out, "sb_testfn_seminorm: null argument")) return s;
    return guarded([&] { *out = sb::seminorm(*fn->fn, {k, l}); });
}

sb_status sb_testfn_metric(const sb_testfn* a, const sb_testfn* b, int trunc, double* out) {
    if (sb_status s = require(a && b && out, "sb_testfn_metric: null argument")) return s;
    return guarded([&] { *out = sb::metric(a->fn, b->fn, trunc); });
}

sb_status sb_testfn_l2norm(const sb_testfn* fn, const sb_regime* regime, double* out) {
    if (sb_status s = require(fn && regime && out, "sb_testfn_l2norm: null argument")) return s;
    return guarded([&] { *out = sb::l2beta_norm(*fn->fn, to_regime(*regime)); });
}

sb_status sb_testfn_grad(const sb_testfn* fn, sb_testfn** out) {
    if (sb_status s = require(fn && out, "sb_testfn_grad: null argument")) return s;
    return guarded([&] { *out = new sb_testfn{sb::grad_beta(fn->fn)}; });
}

sb_status sb_testfn_laplace(const sb_testfn* fn, sb_testfn** out) {
    if (sb_status s = require(fn && out, "sb_testfn_laplace: null argument")) return s;
    return guarded([&] { *out = new sb_testfn{sb::laplace_beta(fn->fn)}; });
}

sb_status sb_testfn_check_membership(const sb_testfn* fn, const sb_regime* regime, int max_k,
                                     double tol, int* pass, double* max_residual) {
    if (sb_status s = require(fn && regime && pass, "sb_testfn_check_membership: null argument"))
        return s;
    return guarded([&] {
        const auto report = sb::validate_membership(fn->fn, to_regime(*regime), max_k, tol);
        *pass = report.passed ? 1 : 0;
        if (max_residual) {
            double worst = 0.0;
            for (const auto& e : report.entries) worst = std::max(worst, e.residual / e.scale);
            *max_residual = worst;
        }
    });
}

sb_status sb_heat_kernel(double t, double x, int n, double* out) {
    if (sb_status s = require(out != nullptr, "sb_heat_kernel: null output")) return s;
    return guarded([&] { *out = sb::heat_kernel_deriv(t, x, n); });
}

sb_status sb_semigroup_eval(const sb_regime* regime, double t, const sb_testfn* fn, double x,
                            int k, int right_side, double* out) {
    if (sb_status s = require(regime && fn && out, "sb_semigroup_eval: null argument")) return s;
    return guarded(
        [&] { *out = sb::semigroup_eval(to_regime(*regime), t, fn->fn, x, k, side_of(right_side)); });
}

sb_status sb_semigroup_image(const sb_regime* regime, double t, const sb_testfn* fn,
                             sb_testfn** out) {
    if (sb_status s = require(regime && fn && out, "sb_semigroup_image: null argument")) return s;
    return guarded([&] { *out = new sb_testfn{sb::semigroup_image(to_regime(*regime), t, fn->fn)}; });
}

sb_status sb_ou_covariance(const sb_regime* regime, double rho, const sb_testfn* h,
                           const sb_testfn* g, double t, double* out) {
    if (sb_status s = require(regime && h && g && out, "sb_ou_covariance: null argument")) return s;
    return guarded([&] {
        if (!(rho >= 0.0 && rho <= 1.0))
            throw sb::Error(sb::ErrorCode::InvalidArgument, "sb_ou_covariance: rho outside [0,1]");
        *out = sb::ou_covariance_oracle({rho, to_regime(*regime)}, h->fn, g->fn, t);
    });
}

sb_status sb_campaign_run(const char* command, const char* config_path, const char* out_dir,
                          const uint64_t* seed, int workers, const char* regime,
                          const double* beta, const double* alpha, int* exit_code) {
    if (sb_status s =
            require(command && config_path && out_dir && exit_code, "sb_campaign_run: null argument"))
        return s;
    return guarded([&] {
        sb::CampaignOptions opts;
        opts.config_path = config_path;
        opts.out_dir = out_dir;
        if (seed) {
            opts.has_seed_override = true;
            opts.seed_override = *seed;
        }
        opts.workers = workers;
        if (regime) opts.regime_override = regime;
        if (beta) opts.beta_override = *beta;
        if (alpha) opts.alpha_override = *alpha;
        *exit_code = static_cast<int>(sb::run_campaign(command, opts));
    });
}

}  // extern "C"
