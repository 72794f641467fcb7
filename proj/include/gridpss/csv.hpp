#ifndef GRIDPSS_CSV_HPP
#define GRIDPSS_CSV_HPP

#include <filesystem>
#include <string>
#include <vector>

namespace gridpss {

// Deterministic CSV output: header row, 17-significant-digit floats with a
// '.' separator independent of locale, LF line endings, atomic rename.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> columns);

  void add_row(const std::vector<double>& values);
  void add_text_row(const std::vector<std::string>& cells);
  void write(const std::filesystem::path& path) const;

  std::string str() const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

// 17 significant digits (round-trip exact).
std::string format_double(double v);
// Shortest exact representation, used for file-name labels.
std::string format_double_short(double v);

}  // namespace gridpss

#endif
