/* Copyright 2026 The commentclf Authors.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// Writes the separable synthetic corpus used for desk-scale runs.

#include <iostream>

#include <CLI11.hpp>

#include "cclf/data.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Generate a synthetic comment corpus"};
  std::string out;
  cclf::SyntheticSpec spec;
  spec.categories = cclf::default_synthetic_categories();
  app.add_option("--out", out, "Output data root")->required();
  app.add_option("--rows", spec.rows_per_category, "Rows per category");
  app.add_option("--seed", spec.seed, "Generator seed");
  CLI11_PARSE(app, argc, argv);
  try {
    cclf::write_synthetic_corpus(out, spec, cclf::ColumnMap{});
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  for (const auto& k : spec.categories) std::cout << k.language << "/" << k.category << "\n";
  return 0;
}
