#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace kpplab::app {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string measured;  // measured numbers and the threshold they were held to
};

/// "PASS C<id> <title>: <measured>" (or FAIL).
std::string format_result(const CriterionResult& r);

/// Caches the expensive runs shared by several criteria. Artifacts go to `out` when set.
class VerificationContext {
 public:
  explicit VerificationContext(std::optional<std::filesystem::path> out = std::nullopt);
  ~VerificationContext();
  VerificationContext(const VerificationContext&) = delete;
  VerificationContext& operator=(const VerificationContext&) = delete;

  struct Cache;
  Cache& cache() { return *cache_; }
  const std::optional<std::filesystem::path>& out() const { return out_; }

 private:
  std::optional<std::filesystem::path> out_;
  std::unique_ptr<Cache> cache_;
};

inline constexpr int kCriterionCount = 13;

/// Runs one acceptance criterion (1..13). Numerical failures inside a criterion are
/// reported as a failed result carrying the error message.
CriterionResult run_criterion(int id, VerificationContext& ctx);

/// Suite names accepted by `verify`, in documentation order.
const std::vector<std::string>& suite_names();

/// Criteria run by a suite. Throws InvalidArgument for an unknown name.
std::vector<int> suite_criteria(const std::string& suite);

}  // namespace kpplab::app
