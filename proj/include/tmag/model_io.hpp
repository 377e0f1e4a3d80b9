#pragma once

#include <memory>
#include <string>

#include "tmag/hysteresis.hpp"
#include "tmag/table_model.hpp"

namespace tmag {

// Model files are INI-style with a format_version and either an [analytic]
// block (GaussianShape parameters) or a [table] block (grid spec plus
// row-major triangular E values on one line).
void save_model(const GaussianShape& shape, const std::string& path);
void save_model(const TableModel& model, const std::string& path);
std::unique_ptr<HysteresisModel> load_model(const std::string& path);

} // namespace tmag
