#include "cqsm/csv.hpp"

#include <cstdio>
#include <ostream>

namespace cqsm {

std::string format_real(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", value);
    return buf;
}

void CsvWriter::header(const std::vector<std::string>& columns) {
    for (const auto& c : columns) field(std::string_view(c));
    end_row();
}

void CsvWriter::separator() {
    if (row_started_) os_ << ',';
    row_started_ = true;
}

void CsvWriter::field(double value) {
    separator();
    os_ << format_real(value);
}

void CsvWriter::field(long long value) {
    separator();
    os_ << value;
}

void CsvWriter::field(std::string_view text) {
    separator();
    os_ << text;
}

void CsvWriter::empty_field() { separator(); }

void CsvWriter::end_row() {
    os_ << '\n';
    row_started_ = false;
}

}  // namespace cqsm
