// Fixture generator: runs every oracle case, fails loudly on any
// oracle/library disagreement, and writes the versioned fixture file.
// Regeneration is deterministic; the generator verifies idempotence by
// producing the serialization twice.

#include <filesystem>
#include <fstream>
#include <iostream>

#include "oracle_cases.hpp"

int main(int argc, char** argv) {
  const std::string out_dir = argc > 1 ? argv[1] : "fixtures";

  const auto results = oracle::run_all_cases();
  const std::string serialized = oracle::fixtures_json(results);
  const std::string second = oracle::fixtures_json(oracle::run_all_cases());
  if (serialized != second) {
    std::cerr << "FIXTURE GENERATION NOT IDEMPOTENT: two runs disagree\n";
    return 1;
  }

  int failures = 0;
  for (const auto& r : results) {
    if (!r.pass) {
      ++failures;
      std::cerr << "ORACLE DISAGREEMENT: " << r.name << " (max abs error " << r.max_abs_error
                << " > tolerance " << r.tolerance << ")\n";
    } else {
      std::cout << "ok " << r.name << " (max abs error " << r.max_abs_error << ")\n";
    }
  }
  if (failures > 0) {
    std::cerr << failures << " oracle case(s) disagree; fixtures NOT written\n";
    return 1;
  }

  const std::filesystem::path dir = std::filesystem::path(out_dir) / "fixtures_v1";
  std::filesystem::create_directories(dir);
  std::ofstream out(dir / "oracle_cases.json");
  out << serialized;
  std::cout << "wrote " << (dir / "oracle_cases.json").string() << " (" << results.size()
            << " cases)\n";
  return 0;
}
