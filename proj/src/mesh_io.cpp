#include "topogrow/mesh_io.hpp"

#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "topogrow/errors.hpp"

namespace topogrow {

namespace {

std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode) {
    std::ofstream out(path, mode);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    return out;
}

std::ifstream open_in(const std::filesystem::path& path, std::ios::openmode mode) {
    std::ifstream in(path, mode);
    if (!in) throw IoError("cannot open for reading: " + path.string());
    return in;
}

}  // namespace

void save_obj(const TriangleMesh& mesh, const std::filesystem::path& path) {
    std::ofstream out = open_out(path, std::ios::out);
    std::string buffer;
    for (const Vec3& v : mesh.vertices()) {
        buffer += "v ";
        buffer += format_double(v.x);
        buffer += ' ';
        buffer += format_double(v.y);
        buffer += ' ';
        buffer += format_double(v.z);
        buffer += '\n';
    }
    for (const auto& f : mesh.faces()) {
        buffer += "f ";
        buffer += std::to_string(f[0] + 1);
        buffer += ' ';
        buffer += std::to_string(f[1] + 1);
        buffer += ' ';
        buffer += std::to_string(f[2] + 1);
        buffer += '\n';
    }
    out << buffer;
    if (!out) throw IoError("write failed: " + path.string());
}

TriangleMesh load_obj(const std::filesystem::path& path) {
    std::ifstream in = open_in(path, std::ios::in);
    std::vector<Vec3> vertices;
    std::vector<TriangleMesh::Face> faces;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ss(line);
        std::string tag;
        ss >> tag;
        if (tag == "v") {
            Vec3 v;
            ss >> v.x >> v.y >> v.z;
            if (ss.fail()) throw IoError("malformed vertex line in " + path.string());
            vertices.push_back(v);
        } else if (tag == "f") {
            TriangleMesh::Face f;
            std::string tok;
            int count = 0;
            while (ss >> tok && count < 3) {
                // accept "i", "i/..", "i//.." forms
                const std::size_t slash = tok.find('/');
                const std::string idx = slash == std::string::npos ? tok : tok.substr(0, slash);
                f[count++] = static_cast<std::int32_t>(std::stol(idx)) - 1;
            }
            if (count != 3 || (ss >> tok))
                throw IoError("only triangle faces are supported: " + path.string());
            faces.push_back(f);
        }
    }
    return TriangleMesh::create(std::move(vertices), std::move(faces));
}

void save_ply(const TriangleMesh& mesh, const std::filesystem::path& path) {
    std::ofstream out = open_out(path, std::ios::out | std::ios::binary);
    out << "ply\nformat binary_little_endian 1.0\n"
        << "element vertex " << mesh.vertex_count() << "\n"
        << "property float x\nproperty float y\nproperty float z\n"
        << "element face " << mesh.face_count() << "\n"
        << "property list uchar int vertex_indices\nend_header\n";
    for (const Vec3& v : mesh.vertices()) {
        const float p[3] = {static_cast<float>(v.x), static_cast<float>(v.y),
                            static_cast<float>(v.z)};
        out.write(reinterpret_cast<const char*>(p), sizeof(p));
    }
    for (const auto& f : mesh.faces()) {
        const std::uint8_t n = 3;
        out.write(reinterpret_cast<const char*>(&n), 1);
        const std::int32_t idx[3] = {f[0], f[1], f[2]};
        out.write(reinterpret_cast<const char*>(idx), sizeof(idx));
    }
    if (!out) throw IoError("write failed: " + path.string());
}

TriangleMesh load_ply(const std::filesystem::path& path) {
    std::ifstream in = open_in(path, std::ios::in | std::ios::binary);
    std::string line;
    std::int64_t n_vertices = -1, n_faces = -1;
    bool binary_le = false;
    if (!std::getline(in, line) || line != "ply") throw IoError("not a PLY file: " + path.string());
    while (std::getline(in, line)) {
        std::istringstream ss(line);
        std::string tag;
        ss >> tag;
        if (tag == "format") {
            std::string fmt;
            ss >> fmt;
            binary_le = (fmt == "binary_little_endian");
        } else if (tag == "element") {
            std::string name;
            std::int64_t count;
            ss >> name >> count;
            if (name == "vertex") n_vertices = count;
            if (name == "face") n_faces = count;
        } else if (tag == "end_header") {
            break;
        }
    }
    if (!binary_le || n_vertices < 0 || n_faces < 0)
        throw IoError("unsupported PLY layout: " + path.string());

    std::vector<Vec3> vertices(n_vertices);
    for (auto& v : vertices) {
        float p[3];
        in.read(reinterpret_cast<char*>(p), sizeof(p));
        v = {p[0], p[1], p[2]};
    }
    std::vector<TriangleMesh::Face> faces(n_faces);
    for (auto& f : faces) {
        std::uint8_t n = 0;
        in.read(reinterpret_cast<char*>(&n), 1);
        if (n != 3) throw IoError("only triangle faces are supported: " + path.string());
        std::int32_t idx[3];
        in.read(reinterpret_cast<char*>(idx), sizeof(idx));
        f = {idx[0], idx[1], idx[2]};
    }
    if (!in) throw IoError("truncated PLY payload: " + path.string());
    return TriangleMesh::create(std::move(vertices), std::move(faces));
}

}  // namespace topogrow
