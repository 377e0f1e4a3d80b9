#include "tmag/model_io.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "tmag/csv.hpp"
#include "tmag/ini.hpp"

namespace tmag {

void save_model(const GaussianShape& shape, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << "format_version = 1\n[analytic]\n";
    out << "b_r_max = " << fmt_num(shape.b_r_max) << "\n";
    out << "b_sat = " << fmt_num(shape.b_sat) << "\n";
    out << "h_sat = " << fmt_num(shape.h_sat) << "\n";
    out << "h_c = " << fmt_num(shape.h_c) << "\n";
    out << "sigma_c = " << fmt_num(shape.sigma_c) << "\n";
    out << "sigma_u = " << fmt_num(shape.sigma_u) << "\n";
    out << "u_cut = " << fmt_num(shape.u_cut) << "\n";
    out << "h_clip_factor = " << fmt_num(shape.h_clip_factor) << "\n";
    out << "grid_n = " << shape.grid_n << "\n";
    if (!out) throw IoError("write failure on " + path);
}

void save_model(const TableModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << "format_version = 1\n[table]\n";
    out << "h_sat = " << fmt_num(model.h_sat()) << "\n";
    out << "h_clip = " << fmt_num(model.h_clip()) << "\n";
    out << "grid_n = " << model.grid_n() << "\n";
    out << "values =";
    for (double v : model.values()) out << " " << fmt_num(v);
    out << "\n";
    if (!out) throw IoError("write failure on " + path);
}

std::unique_ptr<HysteresisModel> load_model(const std::string& path) {
    const IniDoc doc = IniDoc::parse_file(path);
    const std::string* version = doc.get("", "format_version");
    if (!version) throw ValidationError(path + ": missing format_version");
    if (*version != "1")
        throw ValidationError(path + ": unsupported format_version " + *version);

    if (doc.find("analytic")) {
        GaussianShape shape;
        shape.b_r_max = doc.get_double("analytic", "b_r_max", shape.b_r_max);
        shape.b_sat = doc.get_double("analytic", "b_sat", shape.b_sat);
        shape.h_sat = doc.get_double("analytic", "h_sat", shape.h_sat);
        shape.h_c = doc.get_double("analytic", "h_c", shape.h_c);
        shape.sigma_c = doc.get_double("analytic", "sigma_c", shape.sigma_c);
        shape.sigma_u = doc.get_double("analytic", "sigma_u", shape.sigma_u);
        shape.u_cut = doc.get_double("analytic", "u_cut", shape.u_cut);
        shape.h_clip_factor =
            doc.get_double("analytic", "h_clip_factor", shape.h_clip_factor);
        shape.grid_n = static_cast<int>(doc.get_long("analytic", "grid_n", shape.grid_n));
        doc.reject_unknown({"", "analytic"});
        return std::make_unique<GaussianPreisachModel>(shape);
    }
    if (doc.find("table")) {
        const double h_sat = doc.get_double("table", "h_sat", 0.0);
        const double h_clip = doc.get_double("table", "h_clip", 10.0 * h_sat);
        const int grid_n = static_cast<int>(doc.get_long("table", "grid_n", 0));
        const std::string* packed = doc.get("table", "values");
        if (!packed) throw ValidationError(path + ": [table] block missing values");
        std::vector<double> values;
        values.reserve(static_cast<std::size_t>(grid_n) * (grid_n + 1) / 2);
        const char* s = packed->c_str();
        char* end = nullptr;
        while (*s) {
            const double v = std::strtod(s, &end);
            if (end == s) break;
            values.push_back(v);
            s = end;
        }
        doc.reject_unknown({"", "table"});
        return std::make_unique<TableModel>(h_sat, grid_n, std::move(values), h_clip);
    }
    throw ValidationError(path + ": model file needs an [analytic] or [table] block");
}

} // namespace tmag
