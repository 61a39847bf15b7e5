#pragma once

#include <complex>
#include <iosfwd>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace pii::cli {

/// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitPole = 3;

/// "1.5", "0.3i", "-i", "0.1-2e-3i". Throws std::invalid_argument.
std::complex<double> parse_complex(std::string_view s);

/// 17 significant digits, locale independent.
std::string format_double(double v);

using Field = std::variant<double, long long, bool, std::string>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Field>> rows;
};

std::string to_csv(const Table& t);
/// Single row: a flat object. Several rows: an array of flat objects.
std::string to_json(const Table& t);

/// Entry point shared by the executable and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pii::cli
