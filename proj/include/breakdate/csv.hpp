#pragma once

#include <string>

#include "breakdate/panel.hpp"

namespace breakdate {

struct ObjectiveProfile;

// UTF-8, comma separated, one row per time point and one column per
// dimension. A single non-numeric first row is treated as a header.
// '.' decimal point, no thousands separators.
Panel load_panel_csv(const std::string& path);

void write_panel_csv(const std::string& path, const Panel& data);

// Columns k,value.
void write_profile_csv(const std::string& path, const ObjectiveProfile& profile);

}  // namespace breakdate
