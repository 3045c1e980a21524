# Package marker for agmh.domain
