#pragma once

#include <functional>
#include <string_view>

namespace cvqkd {

/// Receives non-fatal warnings (dropped constraints, regularized inverses).
/// The default sink writes to stderr; tests swap it to capture messages.
using WarningSink = std::function<void(std::string_view)>;

void set_warning_sink(WarningSink sink);
void warn(std::string_view message);

}  // namespace cvqkd
