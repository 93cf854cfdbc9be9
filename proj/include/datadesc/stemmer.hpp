#pragma once

#include <string>
#include <string_view>

namespace datadesc {

/// Porter suffix-stripping stemmer (reference C variant, including the
/// "bli" and "logi" rules). Expects a lowercase word; tokens containing
/// anything but ASCII letters, and words of length <= 2, come back unchanged.
std::string porter_stem(std::string_view word);

}  // namespace datadesc
