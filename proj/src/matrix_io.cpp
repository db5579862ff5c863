// Apache License, Version 2.0, refer to LICENSE.txt

#include "blogflux/matrix_io.hpp"

#include "blogflux/common.hpp"
#include "blogflux/tsv.hpp"

namespace blogflux {

void write_block(std::ostream& out, const std::string& name, const Eigen::MatrixXd& values,
                 const std::vector<std::string>& row_labels) {
  if (!row_labels.empty() && row_labels.size() != static_cast<std::size_t>(values.rows())) {
    throw InvalidArgument("row label count does not match block " + name);
  }
  out << '@' << name << '\t' << values.rows() << '\t' << values.cols() << '\n';
  for (Eigen::Index r = 0; r < values.rows(); ++r) {
    bool first = true;
    if (!row_labels.empty()) {
      out << row_labels[static_cast<std::size_t>(r)];
      first = false;
    }
    for (Eigen::Index c = 0; c < values.cols(); ++c) {
      if (!first) out << '\t';
      out << tsv::format_double(values(r, c));
      first = false;
    }
    out << '\n';
  }
}

BlockFile read_blocks(std::istream& in) {
  BlockFile file;
  std::string line;
  while (tsv::next_record(in, line)) {
    if (line.front() != '@') throw FormatError("expected a block header: " + line);
    const auto head = tsv::split(std::string_view(line).substr(1));
    auto rows = head.size() == 3 ? tsv::parse_int(head[1]) : std::nullopt;
    auto cols = head.size() == 3 ? tsv::parse_int(head[2]) : std::nullopt;
    if (!rows || !cols || *rows < 0 || *cols < 0) throw FormatError("bad block header: " + line);
    const std::string name(head[0]);
    MatrixBlock block;
    block.values.resize(*rows, *cols);
    for (long long r = 0; r < *rows; ++r) {
      if (!tsv::next_record(in, line)) throw FormatError("truncated block " + name);
      const auto f = tsv::split(line);
      std::size_t offset = 0;
      if (f.size() == static_cast<std::size_t>(*cols) + 1) {
        block.row_labels.emplace_back(f[0]);
        offset = 1;
      } else if (f.size() != static_cast<std::size_t>(*cols) && !(*cols == 0 && f.size() == 1)) {
        throw FormatError("wrong field count in block " + name);
      }
      for (long long c = 0; c < *cols; ++c) {
        auto v = tsv::parse_double(f[offset + static_cast<std::size_t>(c)]);
        if (!v) throw FormatError("bad number in block " + name);
        block.values(r, c) = *v;
      }
    }
    if (!block.row_labels.empty() && block.row_labels.size() != static_cast<std::size_t>(*rows)) {
      throw FormatError("inconsistent row labels in block " + name);
    }
    file[name] = std::move(block);
  }
  return file;
}

const MatrixBlock& require_block(const BlockFile& file, const std::string& name) {
  auto it = file.find(name);
  if (it == file.end()) throw FormatError("missing block " + name);
  return it->second;
}

}  // namespace blogflux
