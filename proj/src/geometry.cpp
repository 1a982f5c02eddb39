#include "mcmimo/geometry.hpp"

#include <cstdio>
#include <map>
#include <numbers>
#include <sstream>

#include "mcmimo/error.hpp"

namespace mcmimo {

namespace {

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

void Topology::validate() const {
    require(n_tx >= 1 && n_rx >= 1, ErrorCode::geometry, "topology needs at least one antenna per side");
    require(static_cast<int>(tx_points.size()) == n_tx && static_cast<int>(rx_centers.size()) == n_rx,
            ErrorCode::geometry, "coordinate list sizes do not match antenna counts");
    require(r_r > 0.0, ErrorCode::geometry, "receiver radius must be positive");

    for (int a = 0; a < n_rx; ++a) {
        for (int b = a + 1; b < n_rx; ++b) {
            const double d = (rx_centers[a] - rx_centers[b]).norm();
            if (d <= 2.0 * r_r) {
                fail(ErrorCode::geometry,
                     "receiver spheres " + std::to_string(a + 1) + " and " + std::to_string(b + 1) +
                         " overlap (center distance " + g17(d) + " <= 2*r_r)");
            }
        }
    }
    for (int i = 0; i < n_tx; ++i) {
        for (int j = 0; j < n_rx; ++j) {
            const double d = (tx_points[i] - rx_centers[j]).norm();
            if (d < r_r) {
                fail(ErrorCode::geometry, "tx point " + std::to_string(i + 1) +
                                              " lies inside receiver sphere " + std::to_string(j + 1));
            }
        }
    }
}

Topology build_uca_topology(int n_tx, int n_rx, double r_r, double d_x, double d_yz) {
    require(n_tx == n_rx, ErrorCode::config,
            "unsupported configuration: paired arrays require n_tx == n_rx");
    require(n_tx >= 1, ErrorCode::config, "n_tx must be >= 1");
    require(r_r > 0.0 && d_x > 0.0, ErrorCode::config, "r_r and d_x must be positive");
    require(d_yz > 0.0 || n_rx == 1, ErrorCode::config, "d_yz must be positive for multi-antenna arrays");
    require(d_yz >= 0.0, ErrorCode::config, "d_yz must be non-negative");

    Topology t;
    t.n_tx = n_tx;
    t.n_rx = n_rx;
    t.r_r = r_r;
    t.d_x = d_x;
    t.d_yz = d_yz;
    t.uca = true;

    const double pair_gap = d_x + r_r;          // tx point to paired sphere center
    const double x_rx = pair_gap / 2.0;
    const double x_tx = -pair_gap / 2.0;
    const double ring = (n_rx == 1) ? 0.0 : d_yz + r_r;

    t.tx_points.resize(n_tx);
    t.rx_centers.resize(n_rx);
    for (int i = 0; i < n_rx; ++i) {
        const double theta = 2.0 * std::numbers::pi * i / n_rx;
        const double y = ring * std::cos(theta);
        const double z = ring * std::sin(theta);
        t.rx_centers[i] = {x_rx, y, z};
        t.tx_points[i] = {x_tx, y, z};
    }
    t.validate();
    return t;
}

Topology make_custom_topology(std::vector<Vec3> tx_points, std::vector<Vec3> rx_centers, double r_r) {
    Topology t;
    t.n_tx = static_cast<int>(tx_points.size());
    t.n_rx = static_cast<int>(rx_centers.size());
    t.tx_points = std::move(tx_points);
    t.rx_centers = std::move(rx_centers);
    t.r_r = r_r;
    t.uca = false;
    t.validate();
    return t;
}

std::string Topology::to_kv() const {
    std::ostringstream os;
    os << "topology = " << (uca ? "uca" : "custom") << "\n";
    os << "n_tx = " << n_tx << "\n";
    os << "n_rx = " << n_rx << "\n";
    os << "r_r = " << g17(r_r) << "\n";
    if (uca) {
        os << "d_x = " << g17(d_x) << "\n";
        os << "d_yz = " << g17(d_yz) << "\n";
    } else {
        for (int i = 0; i < n_tx; ++i) {
            os << "tx" << i << " = " << g17(tx_points[i].x) << ' ' << g17(tx_points[i].y) << ' '
               << g17(tx_points[i].z) << "\n";
        }
        for (int j = 0; j < n_rx; ++j) {
            os << "rx" << j << " = " << g17(rx_centers[j].x) << ' ' << g17(rx_centers[j].y) << ' '
               << g17(rx_centers[j].z) << "\n";
        }
    }
    return os.str();
}

Topology Topology::from_kv(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        std::string key = line.substr(0, eq);
        std::string val = line.substr(eq + 1);
        auto trim = [](std::string& s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            s = (b == std::string::npos) ? "" : s.substr(b, e - b + 1);
        };
        trim(key);
        trim(val);
        kv[key] = val;
    }
    auto get = [&](const std::string& k) -> const std::string& {
        auto it = kv.find(k);
        require(it != kv.end(), ErrorCode::data, "topology block missing key '" + k + "'");
        return it->second;
    };

    const std::string kind = get("topology");
    const int n_tx = std::stoi(get("n_tx"));
    const int n_rx = std::stoi(get("n_rx"));
    const double r_r = std::stod(get("r_r"));
    if (kind == "uca") {
        return build_uca_topology(n_tx, n_rx, r_r, std::stod(get("d_x")), std::stod(get("d_yz")));
    }
    require(kind == "custom", ErrorCode::data, "unknown topology kind '" + kind + "'");
    std::vector<Vec3> tx(n_tx), rx(n_rx);
    auto parse3 = [](const std::string& s) {
        Vec3 v;
        std::istringstream vs(s);
        require(static_cast<bool>(vs >> v.x >> v.y >> v.z), ErrorCode::data, "bad coordinate triple");
        return v;
    };
    for (int i = 0; i < n_tx; ++i) tx[i] = parse3(get("tx" + std::to_string(i)));
    for (int j = 0; j < n_rx; ++j) rx[j] = parse3(get("rx" + std::to_string(j)));
    return make_custom_topology(std::move(tx), std::move(rx), r_r);
}

} // namespace mcmimo
