#include "fluidalg/algebra_io.hpp"

#include "fluidalg/errors.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace fluidalg {

using ordered_json = nlohmann::ordered_json;

namespace {

double number(const ordered_json& v, const char* what) {
    if (!v.is_number()) throw DataError(std::string(what) + " must contain only numbers");
    return v.get<double>();
}

Mat read_matrix(const ordered_json& doc, const char* key, int n) {
    if (!doc.contains(key)) throw StructuralError(std::string("missing key '") + key + "'");
    const auto& v = doc.at(key);
    if (!v.is_array()) throw StructuralError(std::string("'") + key + "' must be an array");
    Mat m(n, n);
    if (v.size() == static_cast<std::size_t>(n) * n && (n == 1 || !v.front().is_array())) {
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) m(r, c) = number(v[static_cast<std::size_t>(r) * n + c], key);
        return m;
    }
    if (v.size() != static_cast<std::size_t>(n)) {
        throw StructuralError(std::string("'") + key + "' must be " + std::to_string(n) + "x" + std::to_string(n));
    }
    for (int r = 0; r < n; ++r) {
        const auto& row = v[r];
        if (!row.is_array() || row.size() != static_cast<std::size_t>(n)) {
            throw StructuralError(std::string("'") + key + "' row " + std::to_string(r) + " must have " +
                                  std::to_string(n) + " entries");
        }
        for (int c = 0; c < n; ++c) m(r, c) = number(row[c], key);
    }
    return m;
}

int index_value(const ordered_json& v) {
    if (!v.is_number_integer()) throw StructuralError("triple indices must be integers");
    return v.get<int>();
}

}  // namespace

AlgebraArrays parse_algebra_json(const std::string& text) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw StructuralError(std::string("algebra file is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw StructuralError("algebra file must hold a JSON object");
    if (!doc.contains("dim") || !doc.at("dim").is_number_integer() || doc.at("dim").get<int>() <= 0) {
        throw StructuralError("'dim' must be a positive integer");
    }
    AlgebraArrays out;
    out.dim = doc.at("dim").get<int>();
    const int n = out.dim;

    std::vector<TripleEntry> entries;
    if (!doc.contains("triple") || !doc.at("triple").is_array()) {
        throw StructuralError("'triple' must be a list of [i, j, k, value] entries");
    }
    for (const auto& e : doc.at("triple")) {
        if (!e.is_array() || e.size() != 4) throw StructuralError("triple entries must be [i, j, k, value]");
        TripleEntry t{index_value(e[0]), index_value(e[1]), index_value(e[2]), number(e[3], "triple")};
        if (std::min({t.i, t.j, t.k}) < 0 || std::max({t.i, t.j, t.k}) >= n) {
            throw StructuralError("triple entry index out of range for dim " + std::to_string(n));
        }
        if (!(t.i < t.j && t.j < t.k)) {
            std::ostringstream os;
            os << "triple entry [" << t.i << ", " << t.j << ", " << t.k
               << "] violates i < j < k; an alternating form has no independent entries with repeated or "
                  "unordered indices";
            throw ValidationError(os.str());
        }
        entries.push_back(t);
    }
    std::sort(entries.begin(), entries.end(),
              [](const auto& a, const auto& b) { return std::tie(a.i, a.j, a.k) < std::tie(b.i, b.j, b.k); });
    for (std::size_t p = 1; p < entries.size(); ++p) {
        const auto& a = entries[p - 1];
        const auto& b = entries[p];
        if (a.i == b.i && a.j == b.j && a.k == b.k) {
            throw ValidationError("duplicate triple entry [" + std::to_string(a.i) + ", " + std::to_string(a.j) +
                                  ", " + std::to_string(a.k) + "]");
        }
    }
    out.triple = std::move(entries);
    out.linking = read_matrix(doc, "linking", n);
    out.metric = read_matrix(doc, "metric", n);
    return out;
}

AlgebraArrays read_algebra_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw StructuralError("cannot open algebra file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_algebra_json(ss.str());
}

std::string algebra_to_json(const AlgebraArrays& arrays) {
    const int n = arrays.dim;
    ordered_json doc;
    doc["dim"] = n;
    ordered_json triple = ordered_json::array();
    if (const auto* dense = std::get_if<DenseTriple>(&arrays.triple)) {
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                for (int k = j + 1; k < n; ++k)
                    if ((*dense)(i, j, k) != 0.0) triple.push_back({i, j, k, (*dense)(i, j, k)});
    } else {
        for (const auto& e : std::get<std::vector<TripleEntry>>(arrays.triple))
            triple.push_back({e.i, e.j, e.k, e.value});
    }
    doc["triple"] = std::move(triple);
    auto matrix = [n](const Mat& m) {
        ordered_json rows = ordered_json::array();
        for (int r = 0; r < n; ++r) {
            ordered_json row = ordered_json::array();
            for (int c = 0; c < n; ++c) row.push_back(m(r, c));
            rows.push_back(std::move(row));
        }
        return rows;
    };
    doc["linking"] = matrix(arrays.linking);
    doc["metric"] = matrix(arrays.metric);
    return doc.dump(2) + "\n";
}

void write_algebra_file(const std::filesystem::path& path, const AlgebraArrays& arrays) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw StructuralError("cannot write algebra file " + path.string());
    out << algebra_to_json(arrays);
}

}  // namespace fluidalg
