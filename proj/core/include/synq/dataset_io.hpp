#pragma once

#include <filesystem>
#include <string>

#include "synq/testbed.hpp"

namespace synq::testbed {

// JSON-lines interchange: one object per sample with keys
//   features (array of numbers), condition (int), latent (int),
//   source ("real" | "synthetic").
// Doubles are emitted in shortest round-trip form, so equal datasets
// serialize to identical bytes.
std::string to_jsonl(const Dataset& ds);
Dataset from_jsonl(const std::string& text);

void write_jsonl(const Dataset& ds, const std::filesystem::path& path);
Dataset read_jsonl(const std::filesystem::path& path);

}  // namespace synq::testbed
