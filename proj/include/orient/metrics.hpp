#pragma once

#include "orient/circmath.hpp"

#include <json.hpp>

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace orient {

struct EvalReport {
    double mean_ae = 0.0;    // degrees
    double median_ae = 0.0;  // degrees
    double acc_22_5 = 0.0;   // fraction with error <= 22.5
    double acc_45 = 0.0;     // fraction with error <= 45
    std::size_t count = 0;
};

/// Per-sample angular errors in degrees.
std::vector<double> angular_errors(std::span<const Angle> predictions, std::span<const Angle> truths);

/// MeanAE, MedianAE (midpoint for even counts) and boundary-inclusive accuracies.
/// Throws invalid_input on empty or mismatched inputs.
EvalReport evaluate(std::span<const Angle> predictions, std::span<const Angle> truths);
EvalReport evaluate_errors(std::vector<double> errors);

/// "key = value" lines, one per field.
std::string to_key_value(const EvalReport& report);
nlohmann::json to_json(const EvalReport& report);

}  // namespace orient
