// Copyright 2026 The xattr Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Regenerates the bundled fixture files under a data directory.

#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "xattr/fixtures.hpp"
#include "xattr/mine.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Write the bundled fixture files", "make_fixtures"};
  std::string dir = "data";
  app.add_option("--data-dir", dir, "Data directory");
  CLI11_PARSE(app, argc, argv);

  namespace fs = std::filesystem;
  try {
    const fs::path root(dir);
    {
      auto out = xattr::detail::open_output(root / "fixture" / "examples.jsonl");
      xattr::write_handcrafted_examples(out);
    }
    {
      auto out = xattr::detail::open_output(root / "fixture" / "ratings.jsonl");
      xattr::write_jsonl(out, xattr::handcrafted_dataset().ratings, xattr::rating_to_json);
    }
    {
      auto out = xattr::detail::open_output(root / "fixture" / "documents.jsonl");
      xattr::write_jsonl(out, xattr::handcrafted_documents(), xattr::document_to_json);
    }
    {
      auto out = xattr::detail::open_output(root / "lexicon" / "yes_no.v1.json");
      out << xattr::default_lexicon().to_json().dump(2) << '\n';
    }
  } catch (const xattr::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  std::cout << "wrote fixtures under " << dir << '\n';
  return 0;
}
