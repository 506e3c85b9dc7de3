#ifndef CTRLPLACE_CSV_HPP
#define CTRLPLACE_CSV_HPP

#include <string>
#include <vector>

namespace ctrlplace {

/// Shortest round-trippable decimal with at most `sig` significant digits
/// (printf %.*g). All CSV output shares this formatting so reruns are
/// byte-identical.
std::string format_double(double x, int sig = 12);

/// RFC4180-style quoting, applied only when the field needs it.
std::string csv_escape(const std::string& field);

std::string csv_join(const std::vector<std::string>& fields);

/// Splits one CSV line; handles quoted fields.
std::vector<std::string> csv_split(const std::string& line);

}  // namespace ctrlplace

#endif  // CTRLPLACE_CSV_HPP
