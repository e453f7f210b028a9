#include "io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace relukink {

namespace fs = std::filesystem;

std::string format_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void atomic_write_file(const fs::path& dir, const std::string& name,
                       const std::string& content) {
    const fs::path tmp = dir / (name + ".tmp");
    const fs::path target = dir / name;
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open for writing: " + tmp.string());
        out << content;
        out.flush();
        if (!out) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw IoError("write failed: " + tmp.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        std::error_code ec2;
        fs::remove(tmp, ec2);
        throw IoError("rename failed: " + tmp.string() + " -> " + target.string() + ": " +
                      ec.message());
    }
}

std::string read_text_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("read failed: " + path.string());
    return ss.str();
}

ordered_json to_json_array(const Eigen::VectorXd& values) {
    ordered_json arr = ordered_json::array();
    for (Eigen::Index i = 0; i < values.size(); ++i) arr.push_back(values(i));
    return arr;
}

ordered_json to_json_array(const DataPoint& p) {
    ordered_json arr = to_json_array(p.x);
    arr.push_back(p.y);
    return arr;
}

}  // namespace relukink
