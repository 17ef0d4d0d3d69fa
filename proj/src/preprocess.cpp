#include "tcurve/preprocess.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace tcurve {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.push_back("");
    return fields;
}

}  // namespace

void MetaSample::recount() {
    n = 0;
    for (const auto& a : articles) n += a.scores.size();
}

MetaSample load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_csv: cannot open '" + path + "'");

    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("load_csv: '" + path + "' is empty");

    const auto header = split_csv_line(line);
    int t_col = -1, id_col = -1;
    for (std::size_t i = 0; i < header.size(); ++i) {
        const std::string name = trim(header[i]);
        if (name == "t") t_col = static_cast<int>(i);
        else if (name == "article_id") id_col = static_cast<int>(i);
    }
    if (t_col < 0 || id_col < 0)
        throw std::runtime_error("load_csv: header must contain columns 't' and 'article_id'");

    MetaSample sample;
    std::unordered_map<std::string, std::size_t> index;  // article_id -> slot
    std::size_t row = 1;  // header was row 1
    while (std::getline(in, line)) {
        ++row;
        if (trim(line).empty()) continue;
        const auto fields = split_csv_line(line);
        if (static_cast<int>(fields.size()) <= std::max(t_col, id_col))
            throw std::runtime_error("load_csv: row " + std::to_string(row) + ": too few fields");
        const std::string t_str = trim(fields[t_col]);
        double t = 0.0;
        std::size_t consumed = 0;
        try {
            t = std::stod(t_str, &consumed);
        } catch (const std::exception&) {
            throw std::runtime_error("load_csv: row " + std::to_string(row) +
                                     ": cannot parse t value '" + t_str + "'");
        }
        if (consumed != t_str.size() || !std::isfinite(t))
            throw std::runtime_error("load_csv: row " + std::to_string(row) +
                                     ": non-finite or malformed t value '" + t_str + "'");
        const std::string id = trim(fields[id_col]);
        auto it = index.find(id);
        if (it == index.end()) {
            index.emplace(id, sample.articles.size());
            sample.articles.push_back(Article{id, {t}});
        } else {
            sample.articles[it->second].scores.push_back(t);
        }
    }
    if (sample.articles.empty())
        throw std::runtime_error("load_csv: '" + path + "' contains no data rows");
    sample.recount();
    return sample;
}

MetaSample transform(const MetaSample& sample, const PreprocessSpec& spec) {
    if (sample.transformed)
        throw std::logic_error("transform: sample is already transformed");
    if (!std::isfinite(spec.shift))
        throw std::invalid_argument("transform: shift must be finite");

    MetaSample out;
    out.transformed = true;
    out.articles.reserve(sample.articles.size());
    for (const auto& article : sample.articles) {
        Article a;
        a.id = article.id;
        a.scores.reserve(spec.symmetrize ? 2 * article.scores.size() : article.scores.size());
        for (double t : article.scores) {
            if (spec.symmetrize) {
                // keep the pair adjacent: odd-coefficient cancellation is
                // then exact for any even-chunk summation order
                a.scores.push_back(std::abs(t) - spec.shift);
                a.scores.push_back(-std::abs(t) - spec.shift);
            } else {
                a.scores.push_back(t - spec.shift);
            }
        }
        out.articles.push_back(std::move(a));
    }
    out.recount();
    return out;
}

std::vector<std::string> articles_exceeding_cap(const MetaSample& sample, std::size_t cap) {
    std::vector<std::string> offenders;
    if (cap == 0) return offenders;
    for (const auto& a : sample.articles)
        if (a.scores.size() > cap) offenders.push_back(a.id);
    return offenders;
}

}  // namespace tcurve
