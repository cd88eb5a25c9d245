#pragma once

namespace denat::fixtures {

// Binary search in canonical form; hosts the block-swap / operand-swap /
// rename goldens. `arr` appears as 1 def + 4 uses.
inline constexpr const char* kBsearch =
    "int bsearch ( int [ ] arr , int key ) { "
    "if ( len ( arr ) == 0 ) { return 0 - 1 ; } "
    "int low = 0 ; "
    "int high = len ( arr ) - 1 ; "
    "while ( low <= high ) { "
    "int mid = ( low + high ) / 2 ; "
    "if ( arr [ mid ] == key ) { return mid ; } "
    "else { if ( arr [ mid ] < key ) { low = mid + 1 ; } else { high = mid - 1 ; } } "
    "} "
    "return 0 - 1 ; }";

// Linear scan keeping the index after the last hit; donor statement
// "high = mid + 1 ;" and guard variable "i" live here.
inline constexpr const char* kScan =
    "int scan ( int [ ] arr , int key ) { "
    "int high = 0 ; "
    "int i = 0 ; "
    "while ( i < len ( arr ) ) { "
    "int mid = i ; "
    "if ( arr [ mid ] == key ) { high = mid + 1 ; } "
    "i = i + 1 ; "
    "} "
    "return high ; }";

// The for-with-continue loop rewrite example.
inline constexpr const char* kLoopy =
    "void f ( ) { "
    "for ( int i = 0 ; i < 10 ; i ++ ) { "
    "if ( i ) { foo ( ) ; continue ; } "
    "bar ( ) ; "
    "} }";

// Hosts both confusing-code patterns.
inline constexpr const char* kConfuse =
    "int confuse ( int j , int x , int p , int q ) { "
    "int i = 0 ; "
    "int y = 0 ; "
    "{ i = j ; j += 1 ; } "
    "if ( x != 0 ) { y = p ; } else { y = q ; } "
    "return i + j + y ; }";

}  // namespace denat::fixtures
