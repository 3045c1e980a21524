# Package marker for agmh.services
