#include <cstdio>
#include <cstdlib>
#include <cstring>

#include "kgt/verify.hpp"

namespace {

int usage() {
  std::fprintf(stderr, "usage: acceptance [--criterion N]\n");
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc)
      only = std::atoi(argv[++i]);
    else
      return usage();
  }
  if (only < 0 || only > kgt::verify::kCriteria) return usage();

  bool all = true;
  for (int id = 1; id <= kgt::verify::kCriteria; ++id) {
    if (only && id != only) continue;
    kgt::verify::CheckResult r = kgt::verify::run_criterion(id);
    std::printf("criterion %d %-28s %s  %.1fs  %s\n", r.id, r.name.c_str(), r.pass ? "PASS" : "FAIL", r.seconds,
                r.detail.c_str());
    all = all && r.pass;
  }
  return all ? 0 : 1;
}
