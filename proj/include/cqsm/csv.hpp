#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace cqsm {

/// `%.9g` decimal rendering used by every CSV and report this library writes.
std::string format_real(double value);

/// Minimal comma-separated writer: header row, LF line endings, `%.9g` reals.
class CsvWriter {
public:
    explicit CsvWriter(std::ostream& os) : os_(os) {}

    void header(const std::vector<std::string>& columns);
    void field(double value);
    void field(long long value);
    void field(std::string_view text);
    void empty_field();
    void end_row();

private:
    void separator();

    std::ostream& os_;
    bool row_started_ = false;
};

}  // namespace cqsm
