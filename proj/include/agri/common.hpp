#pragma once

#include <stdexcept>
#include <string>

namespace agri {

/// Thrown when an input violates a documented precondition or invariant.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double k) const { return {x * k, y * k}; }
    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double cross(const Vec2& o) const { return x * o.y - y * o.x; }
    double norm() const;
    Vec2 unit() const;
    // 90 degree counterclockwise rotation
    Vec2 perp() const { return {-y, x}; }
};

double distance(const Vec2& a, const Vec2& b);

}  // namespace agri
