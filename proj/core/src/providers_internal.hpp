#pragma once

#include "quasar/provider.hpp"

#include <memory>

namespace quasar::detail {

std::unique_ptr<Provider> make_stub_provider(const ProviderConfig& config);
std::unique_ptr<Provider> make_fixture_provider(const ProviderConfig& config);
std::unique_ptr<Provider> make_http_provider(const ProviderConfig& config,
                                             const ImageStore* images);

} // namespace quasar::detail
