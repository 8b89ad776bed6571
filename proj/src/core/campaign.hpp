#pragma once

#include <optional>
#include <string>

#include "config.hpp"

namespace sb {

/// Exit semantics shared by the C API and the CLI: Ok maps to 0, a failed
/// test suite to 1, config/usage problems to 2.
enum class CampaignStatus { Ok = 0, SuiteFailed = 1, UsageError = 2 };

struct CampaignOptions {
    std::string config_path;
    std::string out_dir = ".";
    bool has_seed_override = false;
    std::uint64_t seed_override = 0;
    int workers = 1;
    std::optional<std::string> regime_override;
    std::optional<double> beta_override;
    std::optional<double> alpha_override;
};

CampaignStatus run_validate(const CampaignOptions& opts);
CampaignStatus run_evolve(const CampaignOptions& opts);
CampaignStatus run_simulate(const CampaignOptions& opts);
CampaignStatus run_compare(const CampaignOptions& opts);
CampaignStatus run_report(const CampaignOptions& opts);

/// Dispatch by command name; unknown commands are usage errors.
CampaignStatus run_campaign(const std::string& command, const CampaignOptions& opts);

}  // namespace sb
