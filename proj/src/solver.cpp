namespace cmc {}
