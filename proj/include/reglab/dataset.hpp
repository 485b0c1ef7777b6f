#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "reglab/numkit.hpp"

namespace reglab {

enum class Split { train, val, domain };

// One sample: input block x, optional feature block z (empty when absent),
// label block y. The `domain` tag marks rows that complete an enumerable
// problem domain; the full domain is all rows of the dataset.
struct Row {
  RealVec x;
  RealVec z;
  RealVec y;
  Split split = Split::train;

  bool operator==(const Row&) const = default;
};

struct Dataset {
  std::vector<Row> rows;

  std::vector<std::size_t> indices_of(Split split) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].split == split) out.push_back(i);
    }
    return out;
  }

  std::vector<std::size_t> train_indices() const { return indices_of(Split::train); }
  std::vector<std::size_t> val_indices() const { return indices_of(Split::val); }

  bool has_domain_rows() const {
    for (const auto& row : rows) {
      if (row.split == Split::domain) return true;
    }
    return false;
  }

  std::size_t input_dim() const { return rows.empty() ? 0 : rows.front().x.size(); }
  std::size_t feature_dim() const { return rows.empty() ? 0 : rows.front().z.size(); }
  std::size_t label_dim() const { return rows.empty() ? 0 : rows.front().y.size(); }

  void validate() const {
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].x.size() != input_dim() || rows[i].z.size() != feature_dim() ||
          rows[i].y.size() != label_dim()) {
        throw std::invalid_argument("dataset: inconsistent dimensions at row " +
                                    std::to_string(i));
      }
    }
  }

  bool operator==(const Dataset&) const = default;
};

}  // namespace reglab
