#pragma once

// Accessors for the data files baked into the library at configure time
// (see embedded_data.cpp.in). The same files ship under core/data/.

#include <string_view>

namespace quasar::embedded {

std::string_view builtin_catalog_json();
std::string_view default_model_json();
std::string_view report_schema_json();
std::string_view default_config_json();

} // namespace quasar::embedded
