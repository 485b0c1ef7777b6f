#include "reglab/dataset_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace reglab {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(cell);
      cell.clear();
    } else {
      cell += c;
    }
  }
  cells.push_back(cell);
  return cells;
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

struct HeaderLayout {
  std::size_t n_x = 0;
  std::size_t n_z = 0;
  std::size_t n_y = 0;
  bool has_split = false;
  std::vector<std::string> names;
};

// header must list x0.., then optional z0.., then y0.., then optional split
HeaderLayout parse_header(const std::vector<std::string>& names) {
  HeaderLayout layout;
  layout.names = names;
  std::size_t i = 0;
  auto count_block = [&](char prefix) {
    std::size_t n = 0;
    while (i < names.size() && names[i] == std::string(1, prefix) + std::to_string(n)) {
      ++n;
      ++i;
    }
    return n;
  };
  layout.n_x = count_block('x');
  layout.n_z = count_block('z');
  layout.n_y = count_block('y');
  if (i < names.size() && names[i] == "split") {
    layout.has_split = true;
    ++i;
  }
  if (layout.n_x == 0) {
    throw std::invalid_argument("csv header: expected x0.. input columns first");
  }
  if (layout.n_y == 0) {
    throw std::invalid_argument("csv header: expected y0.. label columns");
  }
  if (i != names.size()) {
    throw std::invalid_argument("csv header: unexpected column '" + names[i] + "'");
  }
  return layout;
}

double parse_cell(const std::string& cell, std::size_t row, const std::string& column) {
  const char* begin = cell.c_str();
  char* end = nullptr;
  const double value = std::strtod(begin, &end);
  if (end == begin || *end != '\0') {
    throw std::invalid_argument("csv: row " + std::to_string(row) + ", column " + column +
                                ": non-numeric cell '" + cell + "'");
  }
  return value;
}

Split parse_split(const std::string& cell, std::size_t row) {
  if (cell == "train") return Split::train;
  if (cell == "val") return Split::val;
  if (cell == "domain") return Split::domain;
  throw std::invalid_argument("csv: row " + std::to_string(row) +
                              ", column split: unknown split '" + cell + "'");
}

const char* split_name(Split split) {
  switch (split) {
    case Split::train: return "train";
    case Split::val: return "val";
    case Split::domain: return "domain";
  }
  return "?";
}

std::string format_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// provenance strings may contain commas; always quote
std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    out += c;
  }
  out += "\"";
  return out;
}

}  // namespace

Dataset parse_dataset_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) {
    throw std::invalid_argument("csv: empty file");
  }
  const HeaderLayout layout = parse_header(split_line(strip_cr(line)));

  Dataset data;
  std::size_t row_number = 0;
  while (std::getline(in, line)) {
    line = strip_cr(line);
    if (line.empty()) continue;
    ++row_number;

    const auto cells = split_line(line);
    if (cells.size() != layout.names.size()) {
      throw std::invalid_argument("csv: row " + std::to_string(row_number) +
                                  ": expected " + std::to_string(layout.names.size()) +
                                  " cells, got " + std::to_string(cells.size()));
    }

    Row row;
    std::size_t c = 0;
    row.x.reserve(layout.n_x);
    for (std::size_t k = 0; k < layout.n_x; ++k, ++c) {
      row.x.push_back(parse_cell(cells[c], row_number, layout.names[c]));
    }
    row.z.reserve(layout.n_z);
    for (std::size_t k = 0; k < layout.n_z; ++k, ++c) {
      row.z.push_back(parse_cell(cells[c], row_number, layout.names[c]));
    }
    row.y.reserve(layout.n_y);
    for (std::size_t k = 0; k < layout.n_y; ++k, ++c) {
      row.y.push_back(parse_cell(cells[c], row_number, layout.names[c]));
    }
    row.split = layout.has_split ? parse_split(cells[c], row_number) : Split::train;
    data.rows.push_back(std::move(row));
  }
  return data;
}

Dataset load_dataset_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open dataset file: " + path);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_dataset_csv(buffer.str());
}

std::string format_dataset_csv(const Dataset& data) {
  data.validate();
  std::string out;
  for (std::size_t k = 0; k < data.input_dim(); ++k) {
    if (k > 0) out += ",";
    out += "x" + std::to_string(k);
  }
  for (std::size_t k = 0; k < data.feature_dim(); ++k) out += ",z" + std::to_string(k);
  for (std::size_t k = 0; k < data.label_dim(); ++k) out += ",y" + std::to_string(k);
  out += ",split\n";

  for (const auto& row : data.rows) {
    bool first = true;
    auto emit = [&](double v) {
      if (!first) out += ",";
      first = false;
      out += format_value(v);
    };
    for (double v : row.x) emit(v);
    for (double v : row.z) emit(v);
    for (double v : row.y) emit(v);
    out += ",";
    out += split_name(row.split);
    out += "\n";
  }
  return out;
}

void save_dataset_csv(const Dataset& data, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write dataset file: " + path);
  }
  out << format_dataset_csv(data);
  if (!out) {
    throw std::runtime_error("failed writing dataset file: " + path);
  }
}

std::string format_augmented_csv(const Dataset& source,
                                 const std::vector<AugmentedSample>& samples) {
  std::string out;
  const std::size_t n_x = source.input_dim();
  const std::size_t n_z = source.feature_dim();
  const std::size_t n_y = source.label_dim();
  for (std::size_t k = 0; k < n_x; ++k) {
    if (k > 0) out += ",";
    out += "x" + std::to_string(k);
  }
  for (std::size_t k = 0; k < n_z; ++k) out += ",z" + std::to_string(k);
  for (std::size_t k = 0; k < n_y; ++k) out += ",y" + std::to_string(k);
  out += ",split,origin_index,provenance\n";

  for (const auto& s : samples) {
    bool first = true;
    auto emit = [&](double v) {
      if (!first) out += ",";
      first = false;
      out += format_value(v);
    };
    for (double v : s.x_hat) emit(v);
    const RealVec& z = s.z_hat;
    for (std::size_t k = 0; k < n_z; ++k) emit(k < z.size() ? z[k] : 0.0);
    const RealVec& y = s.y_hat.empty() ? source.rows[s.origin_index].y : s.y_hat;
    for (double v : y) emit(v);
    out += ",train," + std::to_string(s.origin_index) + "," + quote(s.provenance) + "\n";
  }
  return out;
}

}  // namespace reglab
