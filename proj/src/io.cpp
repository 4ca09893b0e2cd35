#include "linfb/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "linfb/errors.hpp"

namespace linfb {

double round12(double v) { return std::strtod(fmt_g(v, 12).c_str(), nullptr); }

std::string frontier_to_csv(const RegionFrontier& f) {
    std::string out = "R1,R2\n";
    for (const auto& p : f.points) out += fmt_g(p.R1) + "," + fmt_g(p.R2) + "\n";
    return out;
}

RegionFrontier frontier_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "R1,R2")
        throw ValidationError("csv", "missing R1,R2 header");
    RegionFrontier f;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw ValidationError("csv", "malformed row '" + line + "'");
        char* end = nullptr;
        const double r1 = std::strtod(line.c_str(), &end);
        const double r2 = std::strtod(line.c_str() + comma + 1, &end);
        f.points.push_back({r1, r2});
    }
    return f;
}

ojson frontier_to_json(const RegionFrontier& f) {
    ojson j;
    j["meta"] = ojson::object();
    for (const auto& [k, v] : f.meta) j["meta"][k] = v;
    j["points"] = ojson::array();
    for (const auto& p : f.points) j["points"].push_back({round12(p.R1), round12(p.R2)});
    return j;
}

RegionFrontier frontier_from_json(const ojson& j) {
    RegionFrontier f;
    try {
        for (const auto& [k, v] : j.at("meta").items()) f.meta.emplace_back(k, v.get<std::string>());
        for (const auto& p : j.at("points")) f.points.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("json", e.what());
    }
    return f;
}

std::string dump_json(const ojson& j) { return j.dump(2) + "\n"; }

std::string frontier_to_svg(const RegionFrontier& f, const std::string& title) {
    const double W = 480, H = 400, m = 50;
    double xmax = 0.0, ymax = 0.0;
    for (const auto& p : f.points) {
        xmax = std::max(xmax, p.R1);
        ymax = std::max(ymax, p.R2);
    }
    xmax = xmax > 0 ? xmax * 1.05 : 1.0;
    ymax = ymax > 0 ? ymax * 1.05 : 1.0;
    auto X = [&](double r) { return m + (W - 2 * m) * r / xmax; };
    auto Y = [&](double r) { return H - m - (H - 2 * m) * r / ymax; };
    std::ostringstream s;
    s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << W << "\" height=\""
      << H << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<line x1=\"" << m << "\" y1=\"" << H - m << "\" x2=\"" << W - m << "\" y2=\"" << H - m
      << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << m << "\" y1=\"" << H - m << "\" x2=\"" << m << "\" y2=\"" << m
      << "\" stroke=\"black\"/>\n"
      << "<text x=\"" << W / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">R1 [bits/use] (max "
      << fmt_g(xmax / 1.05, 4) << ")</text>\n"
      << "<text x=\"14\" y=\"" << H / 2 << "\" transform=\"rotate(-90 14," << H / 2
      << ")\" text-anchor=\"middle\">R2 [bits/use] (max " << fmt_g(ymax / 1.05, 4) << ")</text>\n"
      << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\">" << title << "</text>\n"
      << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < f.points.size(); ++i)
        s << (i ? " " : "") << fmt_g(X(f.points[i].R1), 6) << "," << fmt_g(Y(f.points[i].R2), 6);
    s << "\"/>\n</svg>\n";
    return s.str();
}

ojson design_to_json(const FeedbackDesign& d) {
    ojson j;
    j["eta"] = d.eta;
    j["form"] = to_string(d.form);
    j["blocks"] = ojson::array();
    int i = 1;
    for (const auto* S : {&d.M1, &d.M2}) {
        for (const auto& [key, b] : S->blocks()) {
            ojson blk;
            blk["i"] = i;
            blk["l"] = key.first;
            blk["tau"] = key.second;
            blk["rows"] = b.rows();
            blk["cols"] = b.cols();
            blk["entries"] = ojson::array();
            for (Eigen::Index r = 0; r < b.rows(); ++r)
                for (Eigen::Index c = 0; c < b.cols(); ++c) blk["entries"].push_back(b(r, c));
            j["blocks"].push_back(blk);
        }
        ++i;
    }
    return j;
}

FeedbackDesign design_from_json(const ojson& j, const ChannelSpec& spec) {
    try {
        const int eta = j.at("eta").get<int>();
        if (eta < 1) throw ValidationError("design", "eta must be >= 1");
        FeedbackDesign d = FeedbackDesign::zero(parse_form(j.at("form").get<std::string>()), eta, spec);
        if (j.contains("blocks")) {
            for (const auto& blk : j.at("blocks")) {
                const int i = blk.at("i").get<int>();
                const int rows = blk.at("rows").get<int>(), cols = blk.at("cols").get<int>();
                const auto& e = blk.at("entries");
                if (rows < 1 || cols < 1 || static_cast<int>(e.size()) != rows * cols)
                    throw ValidationError("design", "block entries do not match rows x cols");
                DenseMatrix b(rows, cols);
                for (int r = 0; r < rows; ++r)
                    for (int c = 0; c < cols; ++c) b(r, c) = e.at(r * cols + c).get<double>();
                if (i != 1 && i != 2) throw ValidationError("design", "block user index must be 1 or 2");
                (i == 1 ? d.M1 : d.M2).set_block(blk.at("l").get<int>(), blk.at("tau").get<int>(), b);
            }
        }
        d.validate(spec);
        return d;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("design", e.what());
    } catch (const ValidationError&) {
        throw;
    } catch (const Error& e) {
        throw ValidationError("design", e.what());
    }
}

namespace {

double parse_number(const std::string& tok, const std::string& flag) {
    std::size_t pos = 0;
    double v;
    try {
        v = std::stod(tok, &pos);
    } catch (const std::exception&) {
        throw ValidationError(flag, "'" + tok + "' is not a number");
    }
    while (pos < tok.size() && std::isspace(static_cast<unsigned char>(tok[pos]))) ++pos;
    if (pos != tok.size() || !std::isfinite(v))
        throw ValidationError(flag, "'" + tok + "' is not a finite number");
    return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) out.push_back(cur);
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

}  // namespace

std::vector<double> parse_vector(const std::string& text, const std::string& flag) {
    std::vector<double> v;
    for (const auto& tok : split(text, ',')) v.push_back(parse_number(tok, flag));
    if (v.empty()) throw ValidationError(flag, "empty value");
    return v;
}

DenseMatrix parse_matrix(const std::string& text, const std::string& flag) {
    std::vector<std::vector<double>> rows;
    for (const auto& r : split(text, ';')) rows.push_back(parse_vector(r, flag));
    if (rows.empty()) throw ValidationError(flag, "empty matrix");
    const std::size_t c = rows[0].size();
    DenseMatrix M(rows.size(), c);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != c) throw ValidationError(flag, "ragged matrix rows");
        for (std::size_t k = 0; k < c; ++k) M(i, k) = rows[i][k];
    }
    return M;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError(path, "cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError(path, "cannot write file");
    out << content;
}

}  // namespace linfb
