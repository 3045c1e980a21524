# Package marker for agmh.infrastructure
