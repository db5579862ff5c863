// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace blogflux {

// Named dense blocks in one text file:
//   @name<TAB>rows<TAB>cols
//   rows lines of tab-separated values, optionally led by a row label
// Values are written with round-trip precision.
struct MatrixBlock {
  Eigen::MatrixXd values;
  std::vector<std::string> row_labels;  // empty or one per row
};

using BlockFile = std::map<std::string, MatrixBlock>;

void write_block(std::ostream& out, const std::string& name, const Eigen::MatrixXd& values,
                 const std::vector<std::string>& row_labels = {});

// Throws FormatError on truncated or malformed blocks.
BlockFile read_blocks(std::istream& in);

// Throws FormatError when the block is absent.
const MatrixBlock& require_block(const BlockFile& file, const std::string& name);

}  // namespace blogflux
