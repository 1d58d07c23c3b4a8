#ifndef AWSGD_METRICS_HPP_
#define AWSGD_METRICS_HPP_

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <string>

#include "awsgd/errors.hpp"

namespace awsgd {

// Buffered CSV sink for per-step telemetry. Values print with %.17g so a
// re-run with the same seed reproduces the file byte for byte and nothing
// is lost to rounding.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::string& header,
              std::int64_t flushEvery = 1000)
        : out_(path, std::ios::binary | std::ios::trunc), flushEvery_(flushEvery) {
        if (!out_) throw IoError("cannot open metrics file " + path.string());
        out_ << header << '\n';
    }

    void row(std::int64_t t, std::initializer_list<std::optional<double>> values) {
        char buf[32];
        out_ << t;
        for (const auto& v : values) {
            out_.put(',');
            if (v.has_value()) {
                const int len = std::snprintf(buf, sizeof(buf), "%.17g", *v);
                out_.write(buf, len);
            }
        }
        out_.put('\n');
        if (++rowsSinceFlush_ >= flushEvery_) {
            out_.flush();
            rowsSinceFlush_ = 0;
        }
    }

    void flush() { out_.flush(); }

private:
    std::ofstream out_;
    std::int64_t flushEvery_;
    std::int64_t rowsSinceFlush_ = 0;
};

inline constexpr const char* kStepMetricsHeader =
    "t,loss,d_norm_sq,density,tau_norm,elapsed_s,eval_loss";

inline constexpr const char* kMvisMetricsHeader =
    "t,weighted_value,gamma_hat,std_dev,tau_norm";

}  // namespace awsgd

#endif  // AWSGD_METRICS_HPP_
