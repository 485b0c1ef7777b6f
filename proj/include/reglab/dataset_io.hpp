#pragma once

#include <string>
#include <vector>

#include "reglab/augment.hpp"
#include "reglab/dataset.hpp"

namespace reglab {

// CSV layout: header "x0..x(a-1)[,z0..z(b-1)],y0..y(c-1)[,split]" in that
// order with contiguous indices; split values are train|val|domain and rows
// default to train when the column is absent. Parse errors cite the 1-based
// data row and the column name.
Dataset parse_dataset_csv(const std::string& text);
Dataset load_dataset_csv(const std::string& path);

// Values are written with 17 significant digits so load(format(d)) == d.
std::string format_dataset_csv(const Dataset& data);
void save_dataset_csv(const Dataset& data, const std::string& path);

// Same column layout as the source dataset with origin_index and provenance
// columns appended; augmented rows are tagged train.
std::string format_augmented_csv(const Dataset& source,
                                 const std::vector<AugmentedSample>& samples);

}  // namespace reglab
