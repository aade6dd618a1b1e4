#pragma once

#include <string>
#include <vector>

#include "rcs/simulate.hpp"
#include "rcs/sweep.hpp"

namespace rcs {

// shortest round-trippable-ish fixed formatting used in every CSV cell;
// locale-independent
std::string format_g(double v);

// RFC-4180 quoting (applied only when the field needs it)
std::string csv_field(const std::string& s);

// Prediction/sweep table. One leading comment line documents the dB
// normalization (D_dB = 10 log10(D/s)); records use CRLF.
std::string sweep_csv(const std::vector<SweepRow>& rows, double prior_s);

// Per-trial table for simulation runs: trial, distortion.
std::string trials_csv(const SimReport& rep);

}  // namespace rcs
