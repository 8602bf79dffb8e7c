#include "stark/coordinate_io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <system_error>

namespace stark::blockmat {
namespace {

const char* skip_spaces(const char* p, const char* end) {
  while (p != end && (*p == ' ' || *p == '\t' || *p == '\r')) ++p;
  return p;
}

[[noreturn]] void parse_fail(const std::string& path, std::size_t line, const char* what) {
  throw std::runtime_error(path + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

CoordinateFile read_coordinate_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);

  CoordinateFile out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const char* p = line.data();
    const char* end = line.data() + line.size();
    p = skip_spaces(p, end);
    if (p == end) continue;
    if (*p == '#') {
      // Recognize the dimension header; all other comments are ignored.
      const std::string_view sv(p, static_cast<std::size_t>(end - p));
      const auto pos = sv.find("n=");
      if (sv.find("stark-matrix") != std::string_view::npos && pos != std::string_view::npos) {
        std::int64_t n = 0;
        const char* q = sv.data() + pos + 2;
        auto [ptr, ec] = std::from_chars(q, sv.data() + sv.size(), n);
        if (ec == std::errc() && n > 0) out.n_hint = n;
        (void)ptr;
      }
      continue;
    }

    CoordinateEntry e;
    auto [p1, ec1] = std::from_chars(p, end, e.row);
    if (ec1 != std::errc()) parse_fail(path, lineno, "expected row index");
    p = skip_spaces(p1, end);
    auto [p2, ec2] = std::from_chars(p, end, e.col);
    if (ec2 != std::errc()) parse_fail(path, lineno, "expected column index");
    p = skip_spaces(p2, end);
    auto [p3, ec3] = std::from_chars(p, end, e.value);
    if (ec3 != std::errc()) parse_fail(path, lineno, "expected value");
    p = skip_spaces(p3, end);
    if (p != end) parse_fail(path, lineno, "trailing characters after value");
    out.entries.push_back(e);
  }
  return out;
}

void write_coordinate_file(const std::string& path, std::int64_t n,
                           std::span<const CoordinateEntry> entries) {
  std::vector<CoordinateEntry> sorted(entries.begin(), entries.end());
  std::sort(sorted.begin(), sorted.end(), [](const CoordinateEntry& a, const CoordinateEntry& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "# stark-matrix n=" << n << "\n";
  char buf[64];
  for (const CoordinateEntry& e : sorted) {
    if (e.value == 0.0) continue;  // coordinate convention: zeros are implicit
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), e.value);
    if (ec != std::errc()) throw std::runtime_error("value formatting failed");
    out << e.row << ' ' << e.col << ' ';
    out.write(buf, ptr - buf);
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed for " + path);
}

void write_coordinate_file(const std::string& path, const DenseMatrix& m) {
  std::vector<CoordinateEntry> entries;
  for (std::size_t i = 0; i < m.n(); ++i)
    for (std::size_t j = 0; j < m.n(); ++j)
      if (m(i, j) != 0.0)
        entries.push_back({static_cast<std::int64_t>(i), static_cast<std::int64_t>(j), m(i, j)});
  write_coordinate_file(path, static_cast<std::int64_t>(m.n()), entries);
}

}  // namespace stark::blockmat
