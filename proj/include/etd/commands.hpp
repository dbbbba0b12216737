#pragma once
// Experiment pipelines behind the command-line subcommands. Each is a pure function of
// (config, seed, input files) and writes its results below cfg.out.

#include <ostream>
#include <string>

#include "etd/config.hpp"

namespace etd {

// Exit statuses shared by the executable and the tests.
constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitValidation = 2;
constexpr int kExitCheckFailed = 3;

// Writes <out>/dataset.{csv,json}; measurement noise is added when noise.sigma_xi > 0.
int cmd_simulate(const ExperimentConfig& cfg, std::ostream& log);
// Reads the dataset (default <out>/dataset) and writes <out>/map_<indicator>.{csv,json}.
int cmd_image(const ExperimentConfig& cfg, const std::string& dataset_prefix, std::ostream& log);
// Writes <out>/kernel_{PhiPP,PhiSS,PsiPP,PsiSS}.{csv,json} centered on the grid center.
int cmd_kernels(const ExperimentConfig& cfg, std::ostream& log);
// Monte Carlo ensembles: <out>/noise_measurement and/or <out>/noise_clutter.
int cmd_noise(const ExperimentConfig& cfg, std::ostream& log);
// Identity suite report at <out>/identities.txt; returns kExitCheckFailed when any identity fails.
int cmd_verify(const ExperimentConfig& cfg, std::ostream& log);

}  // namespace etd
