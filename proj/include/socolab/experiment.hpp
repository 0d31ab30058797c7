#pragma once

#include <string>
#include <vector>

#include "socolab/config.hpp"

namespace socolab {

inline constexpr const char* kSoftwareVersion = "socolab 0.1.0";

// Pinned CSV schemas; golden tests depend on these strings.
inline constexpr const char* kRoundsHeader =
    "run_id,t,agent,phase,hitting_cost,switching_cost,cum_cost,cum_regret";
inline constexpr const char* kSummaryHeader =
    "agent,T,runs,mean_regret,se,median_regret,trimmed_mean,failures";
inline constexpr const char* kProfileHeader =
    "c1,T,runs,mean_regret,se,failures";

struct ExperimentArtifacts {
  std::string directory;
  std::vector<std::string> files;   // paths written, manifest last
  std::string manifest_path;
};

ExperimentArtifacts run_experiment(const ExperimentConfig& cfg, int jobs = 1);
ExperimentArtifacts sweep_experiment(const ExperimentConfig& cfg,
                                     int jobs = 1);
ExperimentArtifacts tune_c1_experiment(const ExperimentConfig& cfg,
                                       int jobs = 1);

// Plain numeric CSV (one row per matrix row).
Matrix read_matrix_csv(const std::string& path);
std::string diagnose_report(const std::string& model_path,
                            const std::string& estimate_path, int rank_hint);

}  // namespace socolab
