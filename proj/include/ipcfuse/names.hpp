#pragma once

#include <string>
#include <string_view>

namespace ipcfuse {

/// Canonical join key form: trimmed, case-folded, diacritics stripped,
/// internal whitespace collapsed to single spaces. Idempotent.
std::string normalize_name(std::string_view raw);

}  // namespace ipcfuse
