#include <spopo/errors.hpp>
#include <spopo/record_io.hpp>

#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

namespace spopo {

namespace {

constexpr char magic[8] = {'S', 'P', 'O', 'P', 'O', 'R', 'E', 'C'};
constexpr std::uint32_t format_version = 1;

template <class T>
void put(std::ostream& os, const T& v)
{
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& is)
{
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!is) {
        throw physics_error("truncated record file");
    }
    return v;
}

template <class T>
void put_vec(std::ostream& os, const std::vector<T>& v)
{
    os.write(reinterpret_cast<const char*>(v.data()),
             static_cast<std::streamsize>(v.size() * sizeof(T)));
}

template <class T>
void get_vec(std::istream& is, std::vector<T>& v, std::size_t n)
{
    v.resize(n);
    is.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(T)));
    if (!is) {
        throw physics_error("truncated record file");
    }
}

double parse_double(const std::string& s)
{
    double v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) {
        throw physics_error("bad number in record CSV: '" + s + "'");
    }
    return v;
}

} // namespace

std::string format_double(double v)
{
    char buf[40];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, p);
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content)
{
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) {
            throw std::runtime_error("cannot write " + tmp.string());
        }
        os << content;
        if (!os) {
            throw std::runtime_error("write failed for " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

void write_record_binary(const pulse_train_record& rec, const std::filesystem::path& path)
{
    rec.validate();
    std::ostringstream os(std::ios::binary);
    os.write(magic, sizeof magic);
    put(os, format_version);
    put(os, static_cast<std::uint8_t>(rec.fld == field::pump ? 0 : 1));
    put(os, static_cast<std::uint8_t>(rec.intracavity ? 1 : 0));
    put(os, std::uint16_t{0});
    put(os, rec.seed);
    put(os, rec.config_hash);
    put(os, rec.roundtrip_time);
    put(os, rec.bin_width);
    put(os, rec.pulses);
    put(os, static_cast<std::int32_t>(rec.trajectories));
    put(os, static_cast<std::int32_t>(rec.first_trajectory));
    put(os, static_cast<std::uint64_t>(rec.slices()));
    put_vec(os, rec.slice_times);
    std::vector<std::int32_t> idx(rec.slice_index.begin(), rec.slice_index.end());
    put_vec(os, idx);
    put_vec(os, rec.x);
    put_vec(os, rec.y);
    write_file_atomic(path, os.str());
}

pulse_train_record read_record_binary(const std::filesystem::path& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is) {
        throw physics_error("cannot open record " + path.string());
    }
    char m[8];
    is.read(m, sizeof m);
    if (!is || std::memcmp(m, magic, sizeof m) != 0) {
        throw physics_error("not a pulse train record: " + path.string());
    }
    if (get<std::uint32_t>(is) != format_version) {
        throw physics_error("unsupported record format version");
    }
    pulse_train_record rec;
    rec.fld = get<std::uint8_t>(is) == 0 ? field::pump : field::signal;
    rec.intracavity = get<std::uint8_t>(is) != 0;
    get<std::uint16_t>(is);
    rec.seed = get<std::uint64_t>(is);
    rec.config_hash = get<std::uint64_t>(is);
    rec.roundtrip_time = get<double>(is);
    rec.bin_width = get<double>(is);
    rec.pulses = get<std::int64_t>(is);
    rec.trajectories = get<std::int32_t>(is);
    rec.first_trajectory = get<std::int32_t>(is);
    auto S = get<std::uint64_t>(is);
    if (rec.pulses < 0 || rec.trajectories < 0 || S > (1u << 30)) {
        throw physics_error("corrupt record header");
    }
    get_vec(is, rec.slice_times, S);
    std::vector<std::int32_t> idx;
    get_vec(is, idx, S);
    rec.slice_index.assign(idx.begin(), idx.end());
    std::size_t n = static_cast<std::size_t>(rec.trajectories) * S *
                    static_cast<std::size_t>(rec.pulses);
    get_vec(is, rec.x, n);
    get_vec(is, rec.y, n);
    rec.validate();
    return rec;
}

void write_record_csv(const pulse_train_record& rec, const std::filesystem::path& path)
{
    rec.validate();
    std::string out;
    out += "# field=" + std::string(to_string(rec.fld)) +
           (rec.intracavity ? " intracavity" : " output") + "\n";
    out += "# seed=" + std::to_string(rec.seed) + "\n";
    out += "# config_hash=" + std::to_string(rec.config_hash) + "\n";
    out += "# roundtrip_time_s=" + format_double(rec.roundtrip_time) + "\n";
    out += "# bin_width_s=" + format_double(rec.bin_width) + "\n";
    out += "# pulses=" + std::to_string(rec.pulses) + "\n";
    out += "# trajectories=" + std::to_string(rec.trajectories) + "\n";
    out += "# first_trajectory=" + std::to_string(rec.first_trajectory) + "\n";
    out += "trajectory,slice_index,slice_time_s,pulse,x_sqrt_photons_per_s,y_sqrt_photons_per_s\n";
    for (int k = 0; k < rec.trajectories; ++k) {
        for (std::size_t s = 0; s < rec.slices(); ++s) {
            auto xs = rec.series(quadrature::x, k, s);
            auto ys = rec.series(quadrature::y, k, s);
            std::string prefix = std::to_string(rec.first_trajectory + k) + "," +
                                 std::to_string(rec.slice_index[s]) + "," +
                                 format_double(rec.slice_times[s]) + ",";
            for (std::int64_t n = 0; n < rec.pulses; ++n) {
                out += prefix;
                out += std::to_string(n);
                out += ',';
                out += format_double(xs[n]);
                out += ',';
                out += format_double(ys[n]);
                out += '\n';
            }
        }
    }
    write_file_atomic(path, out);
}

pulse_train_record read_record_csv(const std::filesystem::path& path)
{
    std::ifstream is(path);
    if (!is) {
        throw physics_error("cannot open record " + path.string());
    }
    pulse_train_record rec;
    std::string line;
    bool header_seen = false;
    while (std::getline(is, line)) {
        if (line.empty()) {
            continue;
        }
        if (line[0] == '#') {
            auto eq = line.find('=');
            if (eq == std::string::npos) {
                continue;
            }
            std::string key = line.substr(2, eq - 2);
            std::string val = line.substr(eq + 1);
            if (key == "field") {
                rec.fld = val.rfind("pump", 0) == 0 ? field::pump : field::signal;
                rec.intracavity = val.find("intracavity") != std::string::npos;
            } else if (key == "seed") {
                rec.seed = std::stoull(val);
            } else if (key == "config_hash") {
                rec.config_hash = std::stoull(val);
            } else if (key == "roundtrip_time_s") {
                rec.roundtrip_time = parse_double(val);
            } else if (key == "bin_width_s") {
                rec.bin_width = parse_double(val);
            } else if (key == "pulses") {
                rec.pulses = std::stoll(val);
            } else if (key == "trajectories") {
                rec.trajectories = std::stoi(val);
            } else if (key == "first_trajectory") {
                rec.first_trajectory = std::stoi(val);
            }
            continue;
        }
        if (!header_seen) {
            header_seen = true;
            continue;
        }
        std::vector<std::string> cols;
        std::stringstream ss(line);
        std::string c;
        while (std::getline(ss, c, ',')) {
            cols.push_back(c);
        }
        if (cols.size() != 6) {
            throw physics_error("record CSV row has " + std::to_string(cols.size()) + " columns");
        }
        int k = std::stoi(cols[0]);
        int slice = std::stoi(cols[1]);
        // The first trajectory defines the slice grid.
        if (k == rec.first_trajectory && (rec.slice_index.empty() || rec.slice_index.back() != slice)) {
            rec.slice_index.push_back(slice);
            rec.slice_times.push_back(parse_double(cols[2]));
        }
        rec.x.push_back(parse_double(cols[4]));
        rec.y.push_back(parse_double(cols[5]));
    }
    rec.validate();
    return rec;
}

} // namespace spopo
