#pragma once

#include <string>

#include "dregsim/spectrum_model.hpp"

namespace dregsim {

enum class FeatureFormat { svmlight, dense_csv };

// Loads labelled features for real-data runs. Labels are mapped to +1 when
// positive and -1 otherwise (classification as regression).
//   svmlight:  "label idx:value ..." with 1-based indices; d = max index.
//   dense_csv: "label,f1,f2,..." with a constant column count.
// Blank lines and lines starting with '#' are skipped. Throws ParseError
// carrying the line number for malformed lines and InvalidArgument for a
// file without samples.
Dataset load_feature_file(const std::string& path, FeatureFormat format);

// Zero-pads the columns of `data` to `d` features (no-op when already d).
Dataset pad_features(const Dataset& data, std::size_t d);

}  // namespace dregsim
