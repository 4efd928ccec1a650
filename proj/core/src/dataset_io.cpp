#include "synq/dataset_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace synq::testbed {

using nlohmann::json;

std::string to_jsonl(const Dataset& ds) {
    std::string out;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        json j;
        j["features"] = std::vector<double>(ds.row(i).begin(), ds.row(i).end());
        j["condition"] = ds.conditions[i];
        j["latent"] = ds.latents[i];
        j["source"] = ds.sources[i] == Source::real ? "real" : "synthetic";
        out += j.dump();
        out += '\n';
    }
    return out;
}

Dataset from_jsonl(const std::string& text) {
    Dataset ds;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw std::runtime_error("dataset line " + std::to_string(lineno) + ": " + e.what());
        }
        if (!j.contains("features") || !j.contains("condition") || !j.contains("latent") ||
            !j.contains("source"))
            throw std::runtime_error("dataset line " + std::to_string(lineno) +
                                     ": missing required key");
        const auto feats = j.at("features").get<std::vector<double>>();
        const std::string src = j.at("source").get<std::string>();
        if (src != "real" && src != "synthetic")
            throw std::runtime_error("dataset line " + std::to_string(lineno) +
                                     ": source must be \"real\" or \"synthetic\"");
        ds.append(feats, j.at("condition").get<int>(), j.at("latent").get<int>(),
                  src == "real" ? Source::real : Source::synthetic);
    }
    return ds;
}

void write_jsonl(const Dataset& ds, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << to_jsonl(ds);
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

Dataset read_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open dataset file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_jsonl(buf.str());
}

}  // namespace synq::testbed
