#pragma once

#include <string_view>

// Generated at configure time from data/.
namespace worldkeeper::embedded {
std::string_view render_templates();
std::string_view fewshot_examples();
}  // namespace worldkeeper::embedded
