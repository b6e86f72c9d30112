#include "orient/metrics.hpp"

#include "orient/error.hpp"

#include <algorithm>
#include <cstdio>

namespace orient {

std::vector<double> angular_errors(std::span<const Angle> predictions, std::span<const Angle> truths) {
    if (predictions.size() != truths.size()) {
        throw Error(ErrorKind::invalid_input, "predictions and truths differ in length");
    }
    std::vector<double> errors(predictions.size());
    for (std::size_t j = 0; j < predictions.size(); ++j) {
        errors[j] = angular_distance(predictions[j], truths[j]);
    }
    return errors;
}

EvalReport evaluate_errors(std::vector<double> errors) {
    if (errors.empty()) throw Error(ErrorKind::invalid_input, "cannot evaluate an empty prediction set");
    EvalReport r;
    r.count = errors.size();
    std::size_t within_22_5 = 0;
    std::size_t within_45 = 0;
    double total = 0.0;
    for (double e : errors) {
        total += e;
        within_22_5 += e <= 22.5 ? 1 : 0;
        within_45 += e <= 45.0 ? 1 : 0;
    }
    const auto n = static_cast<double>(r.count);
    r.mean_ae = total / n;
    r.acc_22_5 = static_cast<double>(within_22_5) / n;
    r.acc_45 = static_cast<double>(within_45) / n;
    std::sort(errors.begin(), errors.end());
    const std::size_t mid = r.count / 2;
    r.median_ae = r.count % 2 == 1 ? errors[mid] : 0.5 * (errors[mid - 1] + errors[mid]);
    return r;
}

EvalReport evaluate(std::span<const Angle> predictions, std::span<const Angle> truths) {
    return evaluate_errors(angular_errors(predictions, truths));
}

std::string to_key_value(const EvalReport& report) {
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "count = %zu\nmean_ae = %.17g\nmedian_ae = %.17g\nacc_22_5 = %.17g\nacc_45 = %.17g\n",
                  report.count, report.mean_ae, report.median_ae, report.acc_22_5, report.acc_45);
    return buf;
}

nlohmann::json to_json(const EvalReport& report) {
    return {{"count", report.count},
            {"mean_ae", report.mean_ae},
            {"median_ae", report.median_ae},
            {"acc_22_5", report.acc_22_5},
            {"acc_45", report.acc_45}};
}

}  // namespace orient
