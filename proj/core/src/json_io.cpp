#include "qmaxent/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <string>

namespace qmaxent {

namespace {

void append_number(double x, std::string& out) {
    if (!std::isfinite(x)) {
        out += "null";
        return;
    }
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    out += buf;
}

void append_value(const ordered_json& v, std::string& out, int indent, int depth) {
    // indent < 0 selects the compact single-line form.
    const bool pretty = indent >= 0;
    const std::string pad =
        pretty ? std::string(static_cast<std::size_t>(indent) * (depth + 1), ' ') : "";
    const std::string close_pad =
        pretty ? std::string(static_cast<std::size_t>(indent) * depth, ' ') : "";
    const char* open_sep = pretty ? "\n" : "";
    const char* item_sep = pretty ? ",\n" : ",";
    switch (v.type()) {
        case nlohmann::detail::value_t::object: {
            if (v.empty()) {
                out += "{}";
                return;
            }
            out += "{";
            out += open_sep;
            bool first = true;
            for (auto it = v.begin(); it != v.end(); ++it) {
                if (!first) out += item_sep;
                first = false;
                out += pad;
                out += ordered_json(it.key()).dump(); // escaped key
                out += pretty ? ": " : ":";
                append_value(it.value(), out, indent, depth + 1);
            }
            out += open_sep + close_pad + "}";
            return;
        }
        case nlohmann::detail::value_t::array: {
            if (v.empty()) {
                out += "[]";
                return;
            }
            out += "[";
            out += open_sep;
            bool first = true;
            for (const auto& item : v) {
                if (!first) out += item_sep;
                first = false;
                out += pad;
                append_value(item, out, indent, depth + 1);
            }
            out += open_sep + close_pad + "]";
            return;
        }
        case nlohmann::detail::value_t::number_float:
            append_number(v.get<double>(), out);
            return;
        default:
            out += v.dump(); // strings, integers, booleans, null
            return;
    }
}

} // namespace

std::string dump_deterministic(const ordered_json& value, int indent) {
    std::string out;
    append_value(value, out, indent, 0);
    return out;
}

// ================================ layouts ===================================

ordered_json layout_to_json(const SystemLayout& layout) {
    ordered_json doc;
    switch (layout.geometry()) {
        case Geometry::Ring: doc["geometry"] = "ring"; break;
        case Geometry::OpenChain: doc["geometry"] = "open_chain"; break;
        case Geometry::Torus2D: doc["geometry"] = "torus_2x2"; break;
    }
    doc["length"] = layout.linear_size();
    doc["local_dim"] = layout.local_dim();
    return doc;
}

SystemLayout layout_from_json(const ordered_json& doc, std::size_t dim_cap) {
    if (!doc.is_object() || !doc.contains("geometry"))
        throw DomainError("layout document needs a geometry tag");
    const std::string geometry = doc.at("geometry").get<std::string>();
    const int local_dim = doc.value("local_dim", 2);
    if (geometry == "torus_2x2") return SystemLayout::torus_2x2_edges(dim_cap);
    const int length = doc.at("length").get<int>();
    if (geometry == "ring") return SystemLayout::ring(length, local_dim, dim_cap);
    if (geometry == "open_chain") return SystemLayout::open_chain(length, local_dim, dim_cap);
    throw DomainError("unknown geometry '" + geometry + "'");
}

// ============================== constraints =================================

ordered_json constraints_to_json(const ConstraintSet& constraints) {
    ordered_json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["layout"] = layout_to_json(constraints.layout);
    ordered_json regions = ordered_json::array();
    for (const auto& region : constraints.regions.regions) regions.push_back(region);
    doc["regions"] = std::move(regions);
    doc["window"] = constraints.regions.window;
    ordered_json basis = ordered_json::array();
    for (const auto& str : constraints.basis) {
        ordered_json letters;
        for (const auto& [site, letter] : str.letters())
            letters[std::to_string(site)] = std::string(1, letter);
        basis.push_back(std::move(letters));
    }
    doc["basis"] = std::move(basis);
    ordered_json targets = ordered_json::array();
    for (Eigen::Index i = 0; i < constraints.targets.size(); ++i)
        targets.push_back(constraints.targets(i));
    doc["targets"] = std::move(targets);
    return doc;
}

ConstraintSet constraints_from_json(const ordered_json& doc) {
    SystemLayout layout = layout_from_json(doc.at("layout"));

    RegionSet regions;
    for (const auto& region : doc.at("regions"))
        regions.regions.push_back(region.get<std::vector<int>>());
    regions.window = doc.value("window", 0);
    if (regions.regions.empty()) throw DomainError("constraint document has no regions");

    std::vector<PauliString> basis;
    for (const auto& entry : doc.at("basis")) {
        if (!entry.is_object() || entry.empty())
            throw DomainError("basis entries must be non-empty site->letter objects");
        std::vector<std::pair<int, char>> letters;
        for (auto it = entry.begin(); it != entry.end(); ++it) {
            const std::string& value = it.value().get_ref<const std::string&>();
            if (value.size() != 1)
                throw DomainError("Pauli letters must be single characters");
            letters.emplace_back(std::stoi(it.key()), value[0]);
        }
        basis.emplace_back(layout, std::move(letters));
    }
    for (std::size_t i = 0; i < basis.size(); ++i)
        for (std::size_t j = i + 1; j < basis.size(); ++j)
            if (basis[i].same_letters(basis[j]))
                throw DomainError("duplicate basis elements in constraint document");

    const auto& targets_doc = doc.at("targets");
    if (targets_doc.size() != basis.size())
        throw DomainError("targets length does not match the basis");
    Eigen::VectorXd targets(static_cast<Eigen::Index>(basis.size()));
    for (std::size_t i = 0; i < basis.size(); ++i) {
        targets(static_cast<Eigen::Index>(i)) = targets_doc.at(i).get<double>();
        if (std::abs(targets(static_cast<Eigen::Index>(i))) > 1.0 + 1e-9)
            throw DomainError("Pauli target outside [-1, 1]");
    }

    ConstraintSet cs{layout, regions, std::move(basis), std::move(targets), {}};
    cs.region_provenance = region_provenance_for(layout, cs.basis, regions);
    return cs;
}

// ================================= states ===================================

ordered_json state_to_json(const DensityMatrix& state) {
    ordered_json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["layout"] = layout_to_json(state.layout());
    const auto dim = state.matrix().rows();
    ordered_json re = ordered_json::array();
    ordered_json im = ordered_json::array();
    for (Eigen::Index i = 0; i < dim; ++i) {
        ordered_json re_row = ordered_json::array();
        ordered_json im_row = ordered_json::array();
        for (Eigen::Index j = 0; j < dim; ++j) {
            re_row.push_back(state.matrix()(i, j).real());
            im_row.push_back(state.matrix()(i, j).imag());
        }
        re.push_back(std::move(re_row));
        im.push_back(std::move(im_row));
    }
    doc["re"] = std::move(re);
    doc["im"] = std::move(im);
    return doc;
}

DensityMatrix state_from_json(const ordered_json& doc) {
    SystemLayout layout = layout_from_json(doc.at("layout"));
    const auto dim = static_cast<Eigen::Index>(layout.dim());
    const auto& re = doc.at("re");
    const auto& im = doc.at("im");
    if (static_cast<Eigen::Index>(re.size()) != dim || static_cast<Eigen::Index>(im.size()) != dim)
        throw DomainError("state matrix size does not match the layout");
    Eigen::MatrixXcd m(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        const auto& re_row = re.at(static_cast<std::size_t>(i));
        const auto& im_row = im.at(static_cast<std::size_t>(i));
        if (static_cast<Eigen::Index>(re_row.size()) != dim ||
            static_cast<Eigen::Index>(im_row.size()) != dim)
            throw DomainError("state matrix rows have inconsistent lengths");
        for (Eigen::Index j = 0; j < dim; ++j)
            m(i, j) = {re_row.at(static_cast<std::size_t>(j)).get<double>(),
                       im_row.at(static_cast<std::size_t>(j)).get<double>()};
    }
    return DensityMatrix::from_matrix(std::move(layout), std::move(m));
}

} // namespace qmaxent
