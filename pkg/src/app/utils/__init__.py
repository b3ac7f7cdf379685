# Utils package for helper functions
