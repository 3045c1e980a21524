# Package marker for agmh.core
