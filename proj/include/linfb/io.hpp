#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "linfb/frontier.hpp"
#include "linfb/mimo_regions.hpp"

namespace linfb {

using ojson = nlohmann::ordered_json;

// Rounds to 12 significant digits (the precision of every emitted number).
double round12(double v);

std::string frontier_to_csv(const RegionFrontier& f);
RegionFrontier frontier_from_csv(const std::string& text);

ojson frontier_to_json(const RegionFrontier& f);
RegionFrontier frontier_from_json(const ojson& j);
std::string dump_json(const ojson& j);

std::string frontier_to_svg(const RegionFrontier& f, const std::string& title);

ojson design_to_json(const FeedbackDesign& d);
// Block dims are taken from spec; blocks absent from the file are zero.
FeedbackDesign design_from_json(const ojson& j, const ChannelSpec& spec);

// "a,b;c,d" -> 2x2. `flag` names the option in error messages.
DenseMatrix parse_matrix(const std::string& text, const std::string& flag);
std::vector<double> parse_vector(const std::string& text, const std::string& flag);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace linfb
